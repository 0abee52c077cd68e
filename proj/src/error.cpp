// Copyright 2026 The ibl-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ibl/error.hpp"

namespace ibl {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::TooShort: return "TooShort";
    case Errc::TooLong: return "TooLong";
    case Errc::InvalidProfile: return "InvalidProfile";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::EmptyTrack: return "EmptyTrack";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::EmptyData: return "EmptyData";
    case Errc::NonPositiveEpsilon: return "NonPositiveEpsilon";
    case Errc::SinglePoint: return "SinglePoint";
    case Errc::UnknownMac: return "UnknownMac";
  }
  return "Unknown";
}

}  // namespace ibl
