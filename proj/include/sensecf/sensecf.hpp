#pragma once

// Umbrella header: counterfactual generation, metrics, and augmentation for
// mixed tabular data.

#include "sensecf/augment.hpp"
#include "sensecf/baselines.hpp"
#include "sensecf/cf.hpp"
#include "sensecf/cf_metrics.hpp"
#include "sensecf/core.hpp"
#include "sensecf/data.hpp"
#include "sensecf/encode.hpp"
#include "sensecf/eval.hpp"
#include "sensecf/llm.hpp"
#include "sensecf/model.hpp"
#include "sensecf/prompt.hpp"
#include "sensecf/report.hpp"
#include "sensecf/schema.hpp"
#include "sensecf/transport.hpp"
