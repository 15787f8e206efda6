#pragma once

#include "peerinfl/calibrator.hpp"
#include "peerinfl/cascade.hpp"
#include "peerinfl/estimator.hpp"
#include "peerinfl/generators.hpp"
#include "peerinfl/graph.hpp"
#include "peerinfl/homophily.hpp"
#include "peerinfl/simulator.hpp"
