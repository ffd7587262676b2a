#pragma once

// Umbrella header.

#include "lexclust/affinity.hpp"
#include "lexclust/brown.hpp"
#include "lexclust/clustering.hpp"
#include "lexclust/context.hpp"
#include "lexclust/corpus.hpp"
#include "lexclust/error.hpp"
#include "lexclust/kmeans.hpp"
#include "lexclust/metrics.hpp"
#include "lexclust/pipeline.hpp"
#include "lexclust/spectral.hpp"
