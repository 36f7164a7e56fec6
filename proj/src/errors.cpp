#include "blobgate/errors.hpp"

namespace blobgate {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::DuplicateRoleName: return "DuplicateRoleName";
        case Errc::NoSuchRole: return "NoSuchRole";
        case Errc::NoSuchUser: return "NoSuchUser";
        case Errc::DuplicateUser: return "DuplicateUser";
        case Errc::CardinalityExceeded: return "CardinalityExceeded";
        case Errc::SsdViolation: return "SsdViolation";
        case Errc::DsdViolation: return "DsdViolation";
        case Errc::DuplicateAssignment: return "DuplicateAssignment";
        case Errc::NoSuchAssignment: return "NoSuchAssignment";
        case Errc::CycleDetected: return "CycleDetected";
        case Errc::ExistingViolation: return "ExistingViolation";
        case Errc::AuthFailed: return "AuthFailed";
        case Errc::RoleNotAssigned: return "RoleNotAssigned";
        case Errc::SessionExpired: return "SessionExpired";
        case Errc::NoSuchSession: return "NoSuchSession";
        case Errc::NoSuchTier: return "NoSuchTier";
        case Errc::DuplicateTier: return "DuplicateTier";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::DuplicateAccount: return "DuplicateAccount";
        case Errc::InvalidName: return "InvalidName";
        case Errc::NoSuchAccount: return "NoSuchAccount";
        case Errc::DuplicateContainer: return "DuplicateContainer";
        case Errc::NoSuchContainer: return "NoSuchContainer";
        case Errc::ContainerNotEmpty: return "ContainerNotEmpty";
        case Errc::NoSuchBlob: return "NoSuchBlob";
        case Errc::BlockTooLarge: return "BlockTooLarge";
        case Errc::InvalidBlockId: return "InvalidBlockId";
        case Errc::AccountCapExceeded: return "AccountCapExceeded";
        case Errc::MissingBlock: return "MissingBlock";
        case Errc::BlobTooLarge: return "BlobTooLarge";
        case Errc::SizeNotAligned: return "SizeNotAligned";
        case Errc::NotAligned: return "NotAligned";
        case Errc::RangeOutOfBounds: return "RangeOutOfBounds";
        case Errc::CorruptSnapshot: return "CorruptSnapshot";
        case Errc::UnsupportedVersion: return "UnsupportedVersion";
        case Errc::AuditWriteFailed: return "AuditWriteFailed";
        case Errc::MalformedAuditLine: return "MalformedAuditLine";
        case Errc::IoError: return "IoError";
    }
    return "UnknownError";
}

}  // namespace blobgate
