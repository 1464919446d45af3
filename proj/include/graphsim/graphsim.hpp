#pragma once

#include "graphsim/aligner.hpp"
#include "graphsim/clique.hpp"
#include "graphsim/codec.hpp"
#include "graphsim/decomposition.hpp"
#include "graphsim/error.hpp"
#include "graphsim/generators.hpp"
#include "graphsim/graph.hpp"
#include "graphsim/json_io.hpp"
#include "graphsim/maxent.hpp"
#include "graphsim/similarity.hpp"
#include "graphsim/structure.hpp"
#include "graphsim/summarizer.hpp"
#include "graphsim/transform.hpp"
