#include <mutex>

#include "blobgate/quota.hpp"

#include <cmath>

namespace blobgate {

namespace {

std::optional<std::uint64_t> scale(std::optional<std::uint64_t> base, double multiplier) {
    if (!base) return std::nullopt;
    return static_cast<std::uint64_t>(
        std::ceil(static_cast<double>(*base) * multiplier));
}

// true when a is a strictly higher limit than b (unbounded beats everything)
bool limit_greater(const std::optional<std::uint64_t>& a, const std::optional<std::uint64_t>& b) {
    if (!a) return static_cast<bool>(b);
    if (!b) return false;
    return *a > *b;
}

}  // namespace

EffectiveQuota derive_effective_quota(
    const std::vector<std::pair<QuotaPolicy, double>>& assignments,
    const std::optional<QuotaPolicy>& override_policy, double override_multiplier,
    std::uint32_t default_window_seconds) {
    if (override_policy) {
        return {scale(override_policy->base_limit, override_multiplier),
                override_policy->window_seconds};
    }
    if (assignments.empty()) return {std::uint64_t{0}, default_window_seconds};
    EffectiveQuota best{std::uint64_t{0}, default_window_seconds};
    bool first = true;
    for (const auto& [policy, multiplier] : assignments) {
        auto scaled = scale(policy.base_limit, multiplier);
        if (first || limit_greater(scaled, best.limit)) {
            best = {scaled, policy.window_seconds};
            first = false;
        }
    }
    return best;
}

QuotaEngine::QuotaEngine(Hooks hooks, std::uint32_t default_window_seconds)
    : hooks_(std::move(hooks)), default_window_(default_window_seconds) {}

EffectiveQuota QuotaEngine::effective_quota_locked(const std::string& user_id) const {
    if (!hooks_.user_exists(user_id)) throw Error(Errc::NoSuchUser, user_id);
    std::optional<QuotaPolicy> override_policy;
    auto it = overrides_.find(user_id);
    if (it != overrides_.end()) override_policy = it->second;
    return derive_effective_quota(hooks_.assignment_quotas(user_id), override_policy,
                                  hooks_.max_tier_multiplier(user_id), default_window_);
}

EffectiveQuota QuotaEngine::effective_quota(const std::string& user_id) const {
    std::lock_guard lk(mu_);
    return effective_quota_locked(user_id);
}

QuotaDecision QuotaEngine::record_and_check(const std::string& user_id, std::int64_t now) {
    std::lock_guard lk(mu_);
    EffectiveQuota q = effective_quota_locked(user_id);
    const std::int64_t window = q.window_seconds;
    const std::int64_t window_start = (now / window) * window;
    Counter& c = counters_[user_id];
    if (c.window_start != window_start) {
        c.window_start = window_start;
        c.count = 0;
    }
    if (q.limit && c.count >= *q.limit) {
        // Throttled decisions never touch the counter.
        return {false, std::nullopt, window_start + window - now};
    }
    ++c.count;
    QuotaDecision d;
    d.allowed = true;
    if (q.limit) d.remaining = *q.limit - c.count;
    return d;
}

void QuotaEngine::refund(const std::string& user_id, std::int64_t now) {
    std::lock_guard lk(mu_);
    auto it = counters_.find(user_id);
    if (it == counters_.end() || it->second.count == 0) return;
    EffectiveQuota q = effective_quota_locked(user_id);
    const std::int64_t window = q.window_seconds;
    if (it->second.window_start == (now / window) * window) --it->second.count;
}

UsageSnapshot QuotaEngine::usage(const std::string& user_id, std::int64_t now) const {
    std::lock_guard lk(mu_);
    EffectiveQuota q = effective_quota_locked(user_id);
    const std::int64_t window = q.window_seconds;
    const std::int64_t window_start = (now / window) * window;
    UsageSnapshot s;
    s.limit = q.limit;
    s.window_start = window_start;
    s.window_seconds = q.window_seconds;
    auto it = counters_.find(user_id);
    if (it != counters_.end() && it->second.window_start == window_start)
        s.count = it->second.count;
    return s;
}

void QuotaEngine::set_user_quota_override(const std::string& user_id,
                                          std::optional<QuotaPolicy> policy) {
    std::lock_guard lk(mu_);
    if (!hooks_.user_exists(user_id)) throw Error(Errc::NoSuchUser, user_id);
    if (policy)
        overrides_[user_id] = *policy;
    else
        overrides_.erase(user_id);
}

std::map<std::string, QuotaPolicy> QuotaEngine::export_overrides() const {
    std::lock_guard lk(mu_);
    return overrides_;
}

void QuotaEngine::import_overrides(std::map<std::string, QuotaPolicy> overrides) {
    std::lock_guard lk(mu_);
    overrides_ = std::move(overrides);
    counters_.clear();
}

}  // namespace blobgate
