#pragma once

// Umbrella header: exploration of the attribute combinations on which a
// black-box classifier performs worst.

#include "weakspot/config.hpp"
#include "weakspot/covering.hpp"
#include "weakspot/domain.hpp"
#include "weakspot/errors.hpp"
#include "weakspot/evaluation.hpp"
#include "weakspot/exploration.hpp"
#include "weakspot/exports.hpp"
#include "weakspot/external.hpp"
#include "weakspot/history_io.hpp"
#include "weakspot/metrics.hpp"
#include "weakspot/rng.hpp"
#include "weakspot/schema_io.hpp"
#include "weakspot/selection.hpp"
#include "weakspot/surrogate.hpp"
#include "weakspot/table_io.hpp"
#include "weakspot/text.hpp"
