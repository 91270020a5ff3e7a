#pragma once

// Umbrella header: the full metadata-classification, panel-crawling,
// policy-auditing, snapshot and analysis toolkit.

#include "gptwatch/analysis.hpp"
#include "gptwatch/core_model.hpp"
#include "gptwatch/dataset_store.hpp"
#include "gptwatch/domain.hpp"
#include "gptwatch/fixture_store.hpp"
#include "gptwatch/pipeline.hpp"
#include "gptwatch/policy_audit.hpp"
#include "gptwatch/store_driver.hpp"
#include "gptwatch/url.hpp"
