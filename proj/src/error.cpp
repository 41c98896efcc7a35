// Copyright 2026 The SkyVault Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "skyvault/error.hpp"

namespace skyvault {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadSeedLength: return "BadSeedLength";
    case ErrorCode::BadKeyLength: return "BadKeyLength";
    case ErrorCode::OpenFailed: return "OpenFailed";
    case ErrorCode::AuthFailed: return "AuthFailed";
    case ErrorCode::EmptyIdentifier: return "EmptyIdentifier";
    case ErrorCode::EmptyPassword: return "EmptyPassword";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::WeakPassword: return "WeakPassword";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::UnknownChallenge: return "UnknownChallenge";
    case ErrorCode::Expired: return "Expired";
    case ErrorCode::ResponseMismatch: return "ResponseMismatch";
    case ErrorCode::InvalidToken: return "InvalidToken";
    case ErrorCode::BadChunkSize: return "BadChunkSize";
    case ErrorCode::InsufficientHosts: return "InsufficientHosts";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::UnknownSkylink: return "UnknownSkylink";
    case ErrorCode::IntegrityFailure: return "IntegrityFailure";
    case ErrorCode::AllReplicasDown: return "AllReplicasDown";
    case ErrorCode::KeyAccessDenied: return "KeyAccessDenied";
    case ErrorCode::UnknownHost: return "UnknownHost";
    case ErrorCode::HostUnavailable: return "HostUnavailable";
    case ErrorCode::BadSignature: return "BadSignature";
    case ErrorCode::StaleTimestamp: return "StaleTimestamp";
    case ErrorCode::DuplicateTransaction: return "DuplicateTransaction";
    case ErrorCode::MalformedTransaction: return "MalformedTransaction";
    case ErrorCode::NothingToMine: return "NothingToMine";
    case ErrorCode::UnknownTransaction: return "UnknownTransaction";
    case ErrorCode::InvalidRules: return "InvalidRules";
    case ErrorCode::EmptyRights: return "EmptyRights";
    case ErrorCode::RightsDenied: return "RightsDenied";
    case ErrorCode::NotAuthenticated: return "NotAuthenticated";
    case ErrorCode::UnknownContent: return "UnknownContent";
    case ErrorCode::LedgerRejected: return "LedgerRejected";
    case ErrorCode::EmptyMedia: return "EmptyMedia";
    case ErrorCode::MissingSegment: return "MissingSegment";
    case ErrorCode::PaddingError: return "PaddingError";
    case ErrorCode::MalformedPlaylist: return "MalformedPlaylist";
    case ErrorCode::NoRenditions: return "NoRenditions";
    case ErrorCode::DuplicateBandwidth: return "DuplicateBandwidth";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace skyvault
