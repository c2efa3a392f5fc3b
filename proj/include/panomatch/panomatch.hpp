#pragma once

// Umbrella header: panorama-to-panorama matching via memory vectors.

#include "panomatch/corpus.hpp"
#include "panomatch/errors.hpp"
#include "panomatch/eval.hpp"
#include "panomatch/geo.hpp"
#include "panomatch/index.hpp"
#include "panomatch/io.hpp"
#include "panomatch/matrix.hpp"
#include "panomatch/memvec.hpp"
#include "panomatch/pca.hpp"
#include "panomatch/rng.hpp"
#include "panomatch/search.hpp"
#include "panomatch/solve.hpp"
#include "panomatch/sparse.hpp"
#include "panomatch/synth.hpp"
#include "panomatch/toy.hpp"
