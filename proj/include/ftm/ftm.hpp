#pragma once
// Everything in one include.

#include "ftm/calibrate.hpp"
#include "ftm/dsl.hpp"
#include "ftm/error.hpp"
#include "ftm/factor.hpp"
#include "ftm/folk.hpp"
#include "ftm/hash.hpp"
#include "ftm/inference.hpp"
#include "ftm/intervention.hpp"
#include "ftm/json_io.hpp"
#include "ftm/model_io.hpp"
#include "ftm/network.hpp"
#include "ftm/noisy_or.hpp"
#include "ftm/philox.hpp"
#include "ftm/simulator.hpp"
#include "ftm/targets.hpp"
