//
// Copyright 2026 The CorrDP Authors
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
//

#ifndef CORRDP_CORRDP_HPP_
#define CORRDP_CORRDP_HPP_

#include "corrdp/accounting.hpp"
#include "corrdp/config.hpp"
#include "corrdp/dataset.hpp"
#include "corrdp/distribution.hpp"
#include "corrdp/errors.hpp"
#include "corrdp/ingest.hpp"
#include "corrdp/losses.hpp"
#include "corrdp/math_util.hpp"
#include "corrdp/mechanisms.hpp"
#include "corrdp/optimizer.hpp"
#include "corrdp/random.hpp"
#include "corrdp/serialization.hpp"
#include "corrdp/tv_estimation.hpp"

#endif  // CORRDP_CORRDP_HPP_
