#pragma once

#include "tastic/error.hpp"
#include "tastic/series.hpp"
#include "tastic/dissimilarity.hpp"
#include "tastic/matrix.hpp"
#include "tastic/clustering.hpp"
#include "tastic/evaluation.hpp"
#include "tastic/datagen.hpp"
#include "tastic/io.hpp"
