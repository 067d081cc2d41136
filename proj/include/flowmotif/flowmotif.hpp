#pragma once

// Umbrella header for the flow-motif library.

#include "errors.hpp"
#include "fingerprint.hpp"
#include "ingest.hpp"
#include "kmeans.hpp"
#include "motif.hpp"
#include "null_model.hpp"
#include "parallel.hpp"
#include "pca.hpp"
#include "pipeline.hpp"
#include "possession.hpp"
#include "report.hpp"
#include "seeding.hpp"
#include "svg.hpp"
#include "synth.hpp"
#include "ward.hpp"
