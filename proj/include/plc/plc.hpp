#pragma once

#include "plc/clustering.hpp"
#include "plc/common.hpp"
#include "plc/dataset.hpp"
#include "plc/disambiguation.hpp"
#include "plc/eig.hpp"
#include "plc/experiment.hpp"
#include "plc/graph.hpp"
#include "plc/kmeans.hpp"
#include "plc/metrics.hpp"
#include "plc/propagation.hpp"
#include "plc/qp.hpp"
#include "plc/solver.hpp"
