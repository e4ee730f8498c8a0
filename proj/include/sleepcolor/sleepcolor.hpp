#pragma once

#include "sleepcolor/deterministic_coloring.hpp"
#include "sleepcolor/errors.hpp"
#include "sleepcolor/experiment.hpp"
#include "sleepcolor/generators.hpp"
#include "sleepcolor/graph.hpp"
#include "sleepcolor/instance_io.hpp"
#include "sleepcolor/metrics.hpp"
#include "sleepcolor/oracle.hpp"
#include "sleepcolor/pipeline.hpp"
#include "sleepcolor/random_coloring.hpp"
#include "sleepcolor/rng.hpp"
#include "sleepcolor/simcore.hpp"
