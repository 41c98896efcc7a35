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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace skyvault {

// Stable error codes. The names are part of the CLI and HTTP wire surface;
// append new codes, never rename.
enum class ErrorCode {
  // crypto_core
  BadSeedLength,
  BadKeyLength,
  OpenFailed,
  AuthFailed,
  EmptyIdentifier,
  EmptyPassword,
  // identity_service
  DuplicateId,
  WeakPassword,
  UnknownId,
  UnknownChallenge,
  Expired,
  ResponseMismatch,
  InvalidToken,
  // storage_network
  BadChunkSize,
  InsufficientHosts,
  EmptyFile,
  UnknownSkylink,
  IntegrityFailure,
  AllReplicasDown,
  KeyAccessDenied,
  UnknownHost,
  HostUnavailable,
  // ledger
  BadSignature,
  StaleTimestamp,
  DuplicateTransaction,
  MalformedTransaction,
  NothingToMine,
  UnknownTransaction,
  // licensing
  InvalidRules,
  EmptyRights,
  RightsDenied,
  NotAuthenticated,
  UnknownContent,
  LedgerRejected,
  // hls_packager
  EmptyMedia,
  MissingSegment,
  PaddingError,
  MalformedPlaylist,
  NoRenditions,
  DuplicateBandwidth,
  // encoding / persistence / cli
  DecodeError,
  IoError,
  InvalidConfig,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Carries the chunk and host that failed verification so every integrity
// failure can be attributed.
class IntegrityError : public Error {
 public:
  IntegrityError(std::uint64_t chunk_index, std::string host_id,
                 const std::string& message)
      : Error(ErrorCode::IntegrityFailure, message),
        chunk_index_(chunk_index),
        host_id_(std::move(host_id)) {}

  std::uint64_t chunk_index() const noexcept { return chunk_index_; }
  const std::string& host_id() const noexcept { return host_id_; }

 private:
  std::uint64_t chunk_index_;
  std::string host_id_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace skyvault
