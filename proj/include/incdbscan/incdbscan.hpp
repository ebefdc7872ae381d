#pragma once

#include "incdbscan/batch.hpp"
#include "incdbscan/bench.hpp"
#include "incdbscan/incremental.hpp"
#include "incdbscan/io.hpp"
#include "incdbscan/model.hpp"
#include "incdbscan/policy.hpp"
#include "incdbscan/synth.hpp"
