#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blobgate/policy_store.hpp"

namespace blobgate {

struct EffectiveQuota {
    std::optional<std::uint64_t> limit;  // nullopt = unbounded
    std::uint32_t window_seconds = 60;
};

struct QuotaDecision {
    bool allowed = false;
    std::optional<std::uint64_t> remaining;   // set when allowed and bounded
    std::int64_t retry_after_seconds = 0;     // set when throttled
};

struct UsageSnapshot {
    std::uint64_t count = 0;
    std::optional<std::uint64_t> limit;
    std::int64_t window_start = 0;
    std::uint32_t window_seconds = 60;
};

// Pure derivation of a user's effective quota: max over assignments of
// ceil(base_limit * tier multiplier); an unbounded base wins outright; a
// per-user override replaces the role-derived base before the multiplier.
// No assignments and no override means limit 0.
EffectiveQuota derive_effective_quota(
    const std::vector<std::pair<QuotaPolicy, double>>& assignments,
    const std::optional<QuotaPolicy>& override_policy, double override_multiplier,
    std::uint32_t default_window_seconds);

// Fixed-window transaction counters, one per user, aligned to epoch multiples
// of the window length. record_and_check is linearizable per user.
class QuotaEngine {
public:
    struct Hooks {
        std::function<bool(const std::string&)> user_exists;
        std::function<std::vector<std::pair<QuotaPolicy, double>>(const std::string&)>
            assignment_quotas;
        std::function<double(const std::string&)> max_tier_multiplier;
    };

    QuotaEngine(Hooks hooks, std::uint32_t default_window_seconds = 60);

    EffectiveQuota effective_quota(const std::string& user_id) const;
    QuotaDecision record_and_check(const std::string& user_id, std::int64_t now);
    // Releases one admitted transaction that never executed (the gateway
    // reserves before executing and refunds when execution fails), so 4xx
    // responses leave the usage counter net unchanged.
    void refund(const std::string& user_id, std::int64_t now);
    UsageSnapshot usage(const std::string& user_id, std::int64_t now) const;
    void set_user_quota_override(const std::string& user_id,
                                 std::optional<QuotaPolicy> policy);

    std::map<std::string, QuotaPolicy> export_overrides() const;
    void import_overrides(std::map<std::string, QuotaPolicy> overrides);

private:
    struct Counter {
        std::int64_t window_start = 0;
        std::uint64_t count = 0;
    };

    EffectiveQuota effective_quota_locked(const std::string& user_id) const;

    Hooks hooks_;
    std::uint32_t default_window_;
    mutable std::mutex mu_;
    std::map<std::string, QuotaPolicy> overrides_;
    std::map<std::string, Counter> counters_;
};

}  // namespace blobgate
