#pragma once

// Umbrella header for the graph data augmentation library.

#include "gda/adam.hpp"
#include "gda/attention.hpp"
#include "gda/augmentation.hpp"
#include "gda/common.hpp"
#include "gda/data_io.hpp"
#include "gda/evaluation.hpp"
#include "gda/gcn.hpp"
#include "gda/graph.hpp"
#include "gda/hsic.hpp"
#include "gda/matrix.hpp"
#include "gda/metrics.hpp"
#include "gda/rng.hpp"
#include "gda/tape.hpp"
#include "gda/training.hpp"
