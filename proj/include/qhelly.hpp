#pragma once

#include "qhelly/bounds.hpp"
#include "qhelly/config.hpp"
#include "qhelly/constants.hpp"
#include "qhelly/dr.hpp"
#include "qhelly/experiment.hpp"
#include "qhelly/generators.hpp"
#include "qhelly/geometry.hpp"
#include "qhelly/io.hpp"
#include "qhelly/john.hpp"
#include "qhelly/linalg.hpp"
#include "qhelly/lp.hpp"
#include "qhelly/nnls.hpp"
#include "qhelly/pivovarov.hpp"
#include "qhelly/polytope.hpp"
#include "qhelly/random.hpp"
#include "qhelly/selection.hpp"
