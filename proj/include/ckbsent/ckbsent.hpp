// Copyright 2026 The ckbsent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Umbrella header.

#include "ckbsent/common.hpp"
#include "ckbsent/unicode.hpp"
#include "ckbsent/corpus.hpp"
#include "ckbsent/annotation.hpp"
#include "ckbsent/features.hpp"
#include "ckbsent/classifiers.hpp"
#include "ckbsent/neural.hpp"
#include "ckbsent/eval.hpp"
#include "ckbsent/augment.hpp"
#include "ckbsent/experiment.hpp"
#include "ckbsent/synthetic.hpp"
