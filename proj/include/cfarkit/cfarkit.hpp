/* Copyright 2026 the cfarkit authors
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

#ifndef CFARKIT_CFARKIT_HPP
#define CFARKIT_CFARKIT_HPP

#include "cfarkit/detector.hpp"
#include "cfarkit/engine.hpp"
#include "cfarkit/error.hpp"
#include "cfarkit/gof.hpp"
#include "cfarkit/gofbench.hpp"
#include "cfarkit/grid.hpp"
#include "cfarkit/loss.hpp"
#include "cfarkit/models.hpp"
#include "cfarkit/raster.hpp"
#include "cfarkit/rng.hpp"
#include "cfarkit/simulator.hpp"
#include "cfarkit/stencil.hpp"

#endif  // CFARKIT_CFARKIT_HPP
