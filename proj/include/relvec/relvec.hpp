#pragma once

#include "relvec/agglomerative.hpp"
#include "relvec/ari.hpp"
#include "relvec/clustering_result.hpp"
#include "relvec/config.hpp"
#include "relvec/dbscan.hpp"
#include "relvec/distance.hpp"
#include "relvec/embeddings.hpp"
#include "relvec/error.hpp"
#include "relvec/experiment.hpp"
#include "relvec/gmm.hpp"
#include "relvec/kmeans.hpp"
#include "relvec/matrix.hpp"
#include "relvec/pair_corpus.hpp"
#include "relvec/pooling.hpp"
#include "relvec/projection.hpp"
#include "relvec/score_grid.hpp"
