// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "randwork/blr.hpp"
#include "randwork/jump_trace.hpp"
#include "randwork/point_trees.hpp"
#include "randwork/run_log.hpp"
#include "randwork/weak_ktrivial.hpp"
