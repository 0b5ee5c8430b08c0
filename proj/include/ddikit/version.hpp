#pragma once

namespace ddikit {

// Tool version, recorded in every artifact header this tool writes.
inline constexpr const char *kToolVersion = "0.1.0";

// Version tag of the structural-key fingerprint scheme.  Bump whenever the
// key table or its semantics change; persisted indexes carry this tag and
// are rejected on mismatch.
inline constexpr const char *kFingerprintVersion = "skeys166/1";

}  // namespace ddikit
