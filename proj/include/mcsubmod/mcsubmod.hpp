#pragma once

#include "mcsubmod/chain.hpp"
#include "mcsubmod/chain_io.hpp"
#include "mcsubmod/entropy_cache.hpp"
#include "mcsubmod/error.hpp"
#include "mcsubmod/info.hpp"
#include "mcsubmod/models.hpp"
#include "mcsubmod/objectives.hpp"
#include "mcsubmod/optimizers.hpp"
#include "mcsubmod/oracle.hpp"
#include "mcsubmod/partition.hpp"
#include "mcsubmod/state_space.hpp"
