#pragma once

// Umbrella header: image ingest, stacked sparse autoencoder, hierarchical
// clustering with cophenetic model selection, and the experiment pipeline.

#include "shapeclust/cluster.hpp"
#include "shapeclust/common.hpp"
#include "shapeclust/cophenet.hpp"
#include "shapeclust/dataset.hpp"
#include "shapeclust/dendrogram.hpp"
#include "shapeclust/distance.hpp"
#include "shapeclust/image.hpp"
#include "shapeclust/linkage.hpp"
#include "shapeclust/meta.hpp"
#include "shapeclust/pipeline.hpp"
#include "shapeclust/png.hpp"
#include "shapeclust/render.hpp"
#include "shapeclust/sae.hpp"
#include "shapeclust/stack.hpp"
#include "shapeclust/synth.hpp"
#include "shapeclust/transfer.hpp"
