#pragma once

#include "ncs/channel.hpp"
#include "ncs/config.hpp"
#include "ncs/dp.hpp"
#include "ncs/estimator.hpp"
#include "ncs/io.hpp"
#include "ncs/lqg.hpp"
#include "ncs/plant.hpp"
#include "ncs/scheduler.hpp"
#include "ncs/sim.hpp"
