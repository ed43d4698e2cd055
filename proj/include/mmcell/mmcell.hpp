// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "array_response.hpp"
#include "beamforming.hpp"
#include "channel.hpp"
#include "channel_dump.hpp"
#include "config_io.hpp"
#include "downlink.hpp"
#include "estimation.hpp"
#include "experiments.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "scenario.hpp"
#include "selftest.hpp"
#include "trial.hpp"
#include "types.hpp"
