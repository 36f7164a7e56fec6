#include "blobgate/policy_store.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "blobgate/digest.hpp"

namespace blobgate {

const char* decision_reason_name(Decision::Reason r) {
    switch (r) {
        case Decision::Reason::Granted: return "Granted";
        case Decision::Reason::NoSession: return "NoSession";
        case Decision::Reason::NoPermission: return "NoPermission";
    }
    return "?";
}

RolePair make_role_pair(const std::string& a, const std::string& b) {
    return a < b ? RolePair{a, b} : RolePair{b, a};
}

PolicyStore::PolicyStore(const Clock& clock, std::uint32_t session_ttl_seconds)
    : clock_(clock), session_ttl_(session_ttl_seconds) {
    data_.tiers["basic"] = 1.0;
    data_.tiers["premium"] = 2.0;
}

const Role& PolicyStore::role_or_throw_locked(const std::string& name) const {
    auto it = data_.roles.find(name);
    if (it == data_.roles.end()) throw Error(Errc::NoSuchRole, name);
    return it->second;
}

const User& PolicyStore::user_or_throw_locked(const std::string& id) const {
    auto it = data_.users.find(id);
    if (it == data_.users.end()) throw Error(Errc::NoSuchUser, id);
    return it->second;
}

void PolicyStore::create_user(const std::string& id, const std::string& display_name,
                              const std::string& secret) {
    create_user_hashed(id, display_name, hash_credential(secret));
}

void PolicyStore::create_user_hashed(const std::string& id, const std::string& display_name,
                                     const std::string& credential_hash) {
    if (id.empty()) throw Error(Errc::InvalidArgument, "empty user id");
    std::unique_lock lk(mu_);
    if (data_.users.count(id)) throw Error(Errc::DuplicateUser, id);
    data_.users[id] = User{id, display_name, credential_hash, {}};
}

void PolicyStore::create_role(const std::string& name, std::optional<std::uint32_t> max_members,
                              const QuotaPolicy& quota) {
    if (name.empty()) throw Error(Errc::InvalidArgument, "empty role name");
    if (max_members && *max_members == 0)
        throw Error(Errc::InvalidArgument, "max_members must be >= 1");
    if (quota.window_seconds == 0)
        throw Error(Errc::InvalidArgument, "window_seconds must be >= 1");
    std::unique_lock lk(mu_);
    if (data_.roles.count(name)) throw Error(Errc::DuplicateRoleName, name);
    data_.roles[name] = Role{name, max_members, quota, {}};
}

void PolicyStore::set_role_cardinality(const std::string& role,
                                       std::optional<std::uint32_t> new_max) {
    if (new_max && *new_max == 0)
        throw Error(Errc::InvalidArgument, "max_members must be >= 1; revoke members instead");
    std::unique_lock lk(mu_);
    auto it = data_.roles.find(role);
    if (it == data_.roles.end()) throw Error(Errc::NoSuchRole, role);
    // Lowering below the current member count is allowed: members are kept
    // and new assignments freeze until revocations bring the count back down.
    it->second.max_members = new_max;
}

void PolicyStore::define_tier(const std::string& name, double multiplier) {
    if (name.empty()) throw Error(Errc::InvalidArgument, "empty tier name");
    if (!(multiplier >= 1.0)) throw Error(Errc::InvalidArgument, "tier multiplier must be >= 1");
    if (name == "basic" && multiplier != 1.0)
        throw Error(Errc::InvalidArgument, "basic tier multiplier is fixed at 1");
    std::unique_lock lk(mu_);
    data_.tiers[name] = multiplier;
}

void PolicyStore::assign_user(const std::string& user_id, const std::string& role_id,
                              const std::string& tier) {
    std::unique_lock lk(mu_);
    user_or_throw_locked(user_id);
    const Role& role = role_or_throw_locked(role_id);
    if (!data_.tiers.count(tier)) throw Error(Errc::NoSuchTier, tier);
    if (data_.assignments.count({user_id, role_id}))
        throw Error(Errc::DuplicateAssignment, user_id + "/" + role_id);
    auto& members = members_[role_id];
    if (role.max_members && members.size() >= *role.max_members)
        throw Error(Errc::CardinalityExceeded, role_id);
    for (const auto& [pair, _] : data_.assignments) {
        if (pair.first != user_id) continue;
        if (data_.ssd_pairs.count(make_role_pair(pair.second, role_id)))
            throw Error(Errc::SsdViolation, pair.second + "/" + role_id);
    }
    data_.assignments[{user_id, role_id}] = tier;
    members.insert(user_id);
}

void PolicyStore::revoke_user(const std::string& user_id, const std::string& role_id) {
    std::unique_lock lk(mu_);
    auto it = data_.assignments.find({user_id, role_id});
    if (it == data_.assignments.end())
        throw Error(Errc::NoSuchAssignment, user_id + "/" + role_id);
    data_.assignments.erase(it);
    members_[role_id].erase(user_id);
    // Keep every session inside the user's remaining assignments.
    for (auto& [_, session] : sessions_)
        if (session.user_id == user_id) session.active_roles.erase(role_id);
}

void PolicyStore::grant_permission_to_role(const std::string& role_id, const Permission& p) {
    std::unique_lock lk(mu_);
    auto it = data_.roles.find(role_id);
    if (it == data_.roles.end()) throw Error(Errc::NoSuchRole, role_id);
    it->second.permissions.insert(p);
}

void PolicyStore::grant_permission_to_user(const std::string& user_id, const Permission& p) {
    std::unique_lock lk(mu_);
    auto it = data_.users.find(user_id);
    if (it == data_.users.end()) throw Error(Errc::NoSuchUser, user_id);
    it->second.direct_permissions.insert(p);
}

bool PolicyStore::would_cycle_locked(const std::string& senior, const std::string& junior) const {
    // Adding senior -> junior creates a cycle iff senior is reachable from junior.
    std::vector<std::string> stack{junior};
    std::set<std::string> seen;
    while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        if (cur == senior) return true;
        if (!seen.insert(cur).second) continue;
        for (const auto& [s, j] : data_.hierarchy)
            if (s == cur) stack.push_back(j);
    }
    return false;
}

void PolicyStore::add_inheritance(const std::string& senior, const std::string& junior) {
    std::unique_lock lk(mu_);
    role_or_throw_locked(senior);
    role_or_throw_locked(junior);
    if (senior == junior || would_cycle_locked(senior, junior))
        throw Error(Errc::CycleDetected, senior + "->" + junior);
    data_.hierarchy.insert({senior, junior});
}

void PolicyStore::add_ssd_pair(const std::string& r1, const std::string& r2) {
    std::unique_lock lk(mu_);
    role_or_throw_locked(r1);
    role_or_throw_locked(r2);
    if (r1 == r2) throw Error(Errc::InvalidArgument, "ssd pair must name two distinct roles");
    const auto& m1 = members_[r1];
    const auto& m2 = members_[r2];
    for (const auto& u : m1)
        if (m2.count(u)) throw Error(Errc::ExistingViolation, "user " + u + " holds both roles");
    data_.ssd_pairs.insert(make_role_pair(r1, r2));
}

void PolicyStore::add_dsd_pair(const std::string& r1, const std::string& r2) {
    std::unique_lock lk(mu_);
    role_or_throw_locked(r1);
    role_or_throw_locked(r2);
    if (r1 == r2) throw Error(Errc::InvalidArgument, "dsd pair must name two distinct roles");
    for (const auto& [_, s] : sessions_)
        if (session_live_locked(s) && s.active_roles.count(r1) && s.active_roles.count(r2))
            throw Error(Errc::ExistingViolation, "session of " + s.user_id + " activates both");
    data_.dsd_pairs.insert(make_role_pair(r1, r2));
}

bool PolicyStore::session_live_locked(const Session& s) const {
    return clock_.now_seconds() < s.expires_at;
}

Session PolicyStore::create_session(const std::string& user_id, const std::string& credential,
                                    const std::set<std::string>& requested_roles) {
    std::unique_lock lk(mu_);
    auto uit = data_.users.find(user_id);
    if (uit == data_.users.end() || !verify_credential(credential, uit->second.credential_hash))
        throw Error(Errc::AuthFailed);
    for (const auto& r : requested_roles)
        if (!data_.assignments.count({user_id, r})) throw Error(Errc::RoleNotAssigned, r);
    for (const auto& a : requested_roles)
        for (const auto& b : requested_roles)
            if (a < b && data_.dsd_pairs.count({a, b}))
                throw Error(Errc::DsdViolation, a + "/" + b);
    Session s;
    s.id = random_token_hex(16);  // 128-bit token
    s.user_id = user_id;
    s.active_roles = requested_roles;
    s.created_at = clock_.now_seconds();
    s.expires_at = s.created_at + session_ttl_;
    sessions_[s.id] = s;
    return s;
}

void PolicyStore::revoke_session(const std::string& session_id) {
    std::unique_lock lk(mu_);
    sessions_.erase(session_id);
}

void PolicyStore::activate_role(const std::string& session_id, const std::string& role_id) {
    std::unique_lock lk(mu_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end() || !session_live_locked(it->second))
        throw Error(Errc::SessionExpired);
    Session& s = it->second;
    if (!data_.assignments.count({s.user_id, role_id}))
        throw Error(Errc::RoleNotAssigned, role_id);
    for (const auto& active : s.active_roles)
        if (data_.dsd_pairs.count(make_role_pair(active, role_id)))
            throw Error(Errc::DsdViolation, active + "/" + role_id);
    s.active_roles.insert(role_id);
}

void PolicyStore::deactivate_role(const std::string& session_id, const std::string& role_id) {
    std::unique_lock lk(mu_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end() || !session_live_locked(it->second))
        throw Error(Errc::SessionExpired);
    it->second.active_roles.erase(role_id);  // removing a non-active role is a no-op
}

std::set<std::string> PolicyStore::role_closure_locked(const std::set<std::string>& starts) const {
    std::set<std::string> closure;
    std::vector<std::string> stack(starts.begin(), starts.end());
    while (!stack.empty()) {
        std::string cur = stack.back();
        stack.pop_back();
        if (!closure.insert(cur).second) continue;
        for (const auto& [s, j] : data_.hierarchy)
            if (s == cur) stack.push_back(j);
    }
    return closure;
}

std::set<Permission> PolicyStore::effective_permissions_locked(
    const User& user, const std::set<std::string>& roles) const {
    std::set<Permission> out = user.direct_permissions;
    for (const auto& role : role_closure_locked(roles)) {
        auto it = data_.roles.find(role);
        if (it == data_.roles.end()) continue;
        out.insert(it->second.permissions.begin(), it->second.permissions.end());
    }
    return out;
}

Decision PolicyStore::check_access(const std::string& session_id, Action action,
                                   const Resource& resource) const {
    std::shared_lock lk(mu_);
    auto sit = sessions_.find(session_id);
    if (sit == sessions_.end() || !session_live_locked(sit->second))
        return Decision::deny(Decision::Reason::NoSession);
    const Session& s = sit->second;
    auto uit = data_.users.find(s.user_id);
    if (uit == data_.users.end()) return Decision::deny(Decision::Reason::NoSession);
    // Grant if any direct user permission or any permission reachable through
    // the active roles' hierarchy closure matches.
    for (const auto& p : effective_permissions_locked(uit->second, s.active_roles))
        if (p.matches(action, resource)) return Decision::grant();
    return Decision::deny(Decision::Reason::NoPermission);
}

std::set<Permission> PolicyStore::effective_permissions(
    const std::string& user_id, const std::set<std::string>& active_roles) const {
    std::shared_lock lk(mu_);
    return effective_permissions_locked(user_or_throw_locked(user_id), active_roles);
}

std::optional<Session> PolicyStore::lookup_session(const std::string& session_id) const {
    std::shared_lock lk(mu_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end() || !session_live_locked(it->second)) return std::nullopt;
    return it->second;
}

std::size_t PolicyStore::member_count(const std::string& role_id) const {
    std::shared_lock lk(mu_);
    role_or_throw_locked(role_id);
    auto it = members_.find(role_id);
    return it == members_.end() ? 0 : it->second.size();
}

std::vector<std::string> PolicyStore::assigned_roles(const std::string& user_id) const {
    std::shared_lock lk(mu_);
    user_or_throw_locked(user_id);
    std::vector<std::string> out;
    for (const auto& [pair, _] : data_.assignments)
        if (pair.first == user_id) out.push_back(pair.second);
    return out;
}

std::vector<std::pair<QuotaPolicy, double>> PolicyStore::assignment_quotas(
    const std::string& user_id) const {
    std::shared_lock lk(mu_);
    user_or_throw_locked(user_id);
    std::vector<std::pair<QuotaPolicy, double>> out;
    for (const auto& [pair, tier] : data_.assignments) {
        if (pair.first != user_id) continue;
        auto rit = data_.roles.find(pair.second);
        auto tit = data_.tiers.find(tier);
        if (rit == data_.roles.end()) continue;
        out.emplace_back(rit->second.default_quota,
                         tit == data_.tiers.end() ? 1.0 : tit->second);
    }
    return out;  // assignments map is ordered by (user, role), so output is sorted by role
}

double PolicyStore::max_tier_multiplier(const std::string& user_id) const {
    std::shared_lock lk(mu_);
    double best = 1.0;
    for (const auto& [pair, tier] : data_.assignments) {
        if (pair.first != user_id) continue;
        auto tit = data_.tiers.find(tier);
        if (tit != data_.tiers.end()) best = std::max(best, tit->second);
    }
    return best;
}

bool PolicyStore::user_exists(const std::string& user_id) const {
    std::shared_lock lk(mu_);
    return data_.users.count(user_id) > 0;
}

std::optional<Role> PolicyStore::find_role(const std::string& name) const {
    std::shared_lock lk(mu_);
    auto it = data_.roles.find(name);
    if (it == data_.roles.end()) return std::nullopt;
    return it->second;
}

std::map<std::string, double> PolicyStore::tiers() const {
    std::shared_lock lk(mu_);
    return data_.tiers;
}

PolicyData PolicyStore::export_state() const {
    std::shared_lock lk(mu_);
    return data_;
}

void PolicyStore::import_state(const PolicyData& data) {
    std::unique_lock lk(mu_);
    data_ = data;
    if (!data_.tiers.count("basic")) data_.tiers["basic"] = 1.0;
    members_.clear();
    for (const auto& [pair, _] : data_.assignments) members_[pair.second].insert(pair.first);
    sessions_.clear();
}

}  // namespace blobgate
