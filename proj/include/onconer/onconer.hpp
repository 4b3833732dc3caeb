// Copyright 2026 The onconer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "onconer/corpus.hpp"
#include "onconer/error.hpp"
#include "onconer/evaluate.hpp"
#include "onconer/gazetteer.hpp"
#include "onconer/label.hpp"
#include "onconer/offset_map.hpp"
#include "onconer/pipeline.hpp"
#include "onconer/predict.hpp"
#include "onconer/preprocess.hpp"
#include "onconer/report.hpp"
#include "onconer/tagcodec.hpp"
#include "onconer/unicode.hpp"
