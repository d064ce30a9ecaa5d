#pragma once

// Umbrella header.

#include "actocat/analysis.hpp"
#include "actocat/calibrate.hpp"
#include "actocat/csv.hpp"
#include "actocat/ephemeris.hpp"
#include "actocat/error.hpp"
#include "actocat/ingest.hpp"
#include "actocat/report.hpp"
#include "actocat/rhythm.hpp"
#include "actocat/signal.hpp"
#include "actocat/stats.hpp"
#include "actocat/synthkit.hpp"
#include "actocat/time.hpp"
#include "actocat/types.hpp"
