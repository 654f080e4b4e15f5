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

#ifndef CFARKIT_ERROR_HPP
#define CFARKIT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cfarkit {

/// Base class for everything this library throws on bad input or bad data.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raster / file format
struct FormatError : Error { using Error::Error; };
struct SizeMismatch : Error { using Error::Error; };
struct NonPositivePixel : Error { using Error::Error; };

// Statistics and model fitting
struct EmptyInput : Error { using Error::Error; };
struct InsufficientSamples : Error { using Error::Error; };
struct InvalidPfa : Error { using Error::Error; };
struct ConvergenceFailure : Error { using Error::Error; };
struct OutOfSupport : Error { using Error::Error; };
struct DegenerateCdf : Error { using Error::Error; };

// Detector decision rules
struct NonPositiveBackground : Error { using Error::Error; };
struct ZeroSigma : Error { using Error::Error; };
struct UnsupportedConfig : Error { using Error::Error; };

// Whole-image engine
struct KernelTooLarge : Error { using Error::Error; };
struct DomainMismatch : Error { using Error::Error; };
struct DimMismatch : Error { using Error::Error; };

// Loss bookkeeping
struct NotTabulated : Error { using Error::Error; };

}  // namespace cfarkit

#endif  // CFARKIT_ERROR_HPP
