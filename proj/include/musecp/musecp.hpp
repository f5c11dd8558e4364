#pragma once

// Umbrella header for the MuseCPBench evaluation library.

#include "musecp/audio.hpp"
#include "musecp/config.hpp"
#include "musecp/error.hpp"
#include "musecp/features.hpp"
#include "musecp/fixture_corpus.hpp"
#include "musecp/fixtures.hpp"
#include "musecp/harmony.hpp"
#include "musecp/harness.hpp"
#include "musecp/manifest.hpp"
#include "musecp/melody.hpp"
#include "musecp/metric_value.hpp"
#include "musecp/metrics_info.hpp"
#include "musecp/report.hpp"
#include "musecp/rhythm.hpp"
#include "musecp/structure.hpp"
