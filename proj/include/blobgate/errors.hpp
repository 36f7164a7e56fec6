#pragma once

#include <stdexcept>
#include <string>

namespace blobgate {

// Machine-readable error names. These strings appear verbatim in HTTP error
// bodies and CLI output, so renaming one is a wire-format change.
enum class Errc {
    // rbac-core
    DuplicateRoleName,
    NoSuchRole,
    NoSuchUser,
    DuplicateUser,
    CardinalityExceeded,
    SsdViolation,
    DsdViolation,
    DuplicateAssignment,
    NoSuchAssignment,
    CycleDetected,
    ExistingViolation,
    AuthFailed,
    RoleNotAssigned,
    SessionExpired,
    NoSuchSession,
    NoSuchTier,
    DuplicateTier,
    InvalidArgument,
    // blob-store
    DuplicateAccount,
    InvalidName,
    NoSuchAccount,
    DuplicateContainer,
    NoSuchContainer,
    ContainerNotEmpty,
    NoSuchBlob,
    BlockTooLarge,
    InvalidBlockId,
    AccountCapExceeded,
    MissingBlock,
    BlobTooLarge,
    SizeNotAligned,
    NotAligned,
    RangeOutOfBounds,
    // persistence
    CorruptSnapshot,
    UnsupportedVersion,
    AuditWriteFailed,
    MalformedAuditLine,
    IoError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string detail = {})
        : std::runtime_error(detail.empty() ? errc_name(code)
                                            : std::string(errc_name(code)) + ": " + detail),
          code_(code) {}

    Errc code() const { return code_; }
    const char* name() const { return errc_name(code_); }

private:
    Errc code_;
};

}  // namespace blobgate
