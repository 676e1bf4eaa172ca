/*
 * Copyright 2026 The memorability authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "memorability/audio_features.hpp"
#include "memorability/bayesian_ridge.hpp"
#include "memorability/config.hpp"
#include "memorability/csv.hpp"
#include "memorability/dataset.hpp"
#include "memorability/error.hpp"
#include "memorability/experiment.hpp"
#include "memorability/feature_store.hpp"
#include "memorability/rank_metrics.hpp"
#include "memorability/report.hpp"
#include "memorability/synthetic.hpp"
