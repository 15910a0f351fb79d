// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "randwork/constructions.hpp"
#include "randwork/derivative.hpp"
#include "randwork/desk.hpp"
#include "randwork/errors.hpp"
#include "randwork/experiments.hpp"
#include "randwork/machines.hpp"
#include "randwork/martingale.hpp"
#include "randwork/metric.hpp"
#include "randwork/numeric.hpp"
#include "randwork/pi_class.hpp"
#include "randwork/random_tests.hpp"
#include "randwork/run_log.hpp"
#include "randwork/triviality.hpp"
