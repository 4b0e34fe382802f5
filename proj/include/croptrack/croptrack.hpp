// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 croptrack contributors

#pragma once

#include <croptrack/assignment.hpp>
#include <croptrack/config.hpp>
#include <croptrack/cost_matrix.hpp>
#include <croptrack/feature_bank.hpp>
#include <croptrack/geometry.hpp>
#include <croptrack/kalman.hpp>
#include <croptrack/metrics.hpp>
#include <croptrack/mot_io.hpp>
#include <croptrack/overlay.hpp>
#include <croptrack/perturb.hpp>
#include <croptrack/random.hpp>
#include <croptrack/rerank.hpp>
#include <croptrack/synth.hpp>
#include <croptrack/tracker.hpp>
