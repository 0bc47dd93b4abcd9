// Copyright 2026 The laserstate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "laserstate/errors.hpp"
#include "laserstate/hilbert.hpp"
#include "laserstate/jcpulse.hpp"
#include "laserstate/phase.hpp"
#include "laserstate/prepmeas.hpp"
#include "laserstate/sources.hpp"
#include "laserstate/twolaser.hpp"
