#pragma once

#include "cutofflab/chain.hpp"
#include "cutofflab/errors.hpp"
#include "cutofflab/explicit_tree.hpp"
#include "cutofflab/hitting.hpp"
#include "cutofflab/io.hpp"
#include "cutofflab/mixing.hpp"
#include "cutofflab/simulate.hpp"
#include "cutofflab/spectral.hpp"
#include "cutofflab/tree.hpp"
#include "cutofflab/util.hpp"
#include "cutofflab/verify.hpp"
