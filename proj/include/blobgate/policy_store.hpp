#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "blobgate/clock.hpp"
#include "blobgate/errors.hpp"
#include "blobgate/permission.hpp"

namespace blobgate {

// Transactions-per-window budget. base_limit of nullopt means unbounded;
// 0 means every data-path transaction is denied.
struct QuotaPolicy {
    std::optional<std::uint64_t> base_limit;
    std::uint32_t window_seconds = 60;

    bool operator==(const QuotaPolicy&) const = default;
};

struct User {
    std::string id;
    std::string display_name;
    std::string credential_hash;  // salted, never the secret itself
    std::set<Permission> direct_permissions;
};

struct Role {
    std::string name;
    std::optional<std::uint32_t> max_members;  // nullopt = unbounded
    QuotaPolicy default_quota;
    std::set<Permission> permissions;
};

struct Session {
    std::string id;
    std::string user_id;
    std::set<std::string> active_roles;
    std::int64_t created_at = 0;
    std::int64_t expires_at = 0;
};

struct Decision {
    enum class Reason { Granted, NoSession, NoPermission };
    bool granted = false;
    Reason reason = Reason::NoPermission;

    static Decision grant() { return {true, Reason::Granted}; }
    static Decision deny(Reason r) { return {false, r}; }
};

const char* decision_reason_name(Decision::Reason r);

using RolePair = std::pair<std::string, std::string>;  // stored normalized, first < second

// Serializable policy state, shared with the persistence module. Sessions and
// usage counters are deliberately absent: both are volatile across restarts.
struct PolicyData {
    std::map<std::string, User> users;
    std::map<std::string, Role> roles;
    std::map<std::string, double> tiers;                      // name -> multiplier
    std::map<std::pair<std::string, std::string>, std::string> assignments;  // (user, role) -> tier
    std::set<RolePair> hierarchy;  // (senior, junior)
    std::set<RolePair> ssd_pairs;
    std::set<RolePair> dsd_pairs;
};

// The authorization engine. All mutations take the writer lock; check_access
// and the other queries are read-only and may run concurrently.
class PolicyStore {
public:
    explicit PolicyStore(const Clock& clock, std::uint32_t session_ttl_seconds = 3600);

    // --- users, roles, tiers ---
    void create_user(const std::string& id, const std::string& display_name,
                     const std::string& secret);
    void create_user_hashed(const std::string& id, const std::string& display_name,
                            const std::string& credential_hash);
    void create_role(const std::string& name, std::optional<std::uint32_t> max_members,
                     const QuotaPolicy& quota);
    void set_role_cardinality(const std::string& role, std::optional<std::uint32_t> new_max);
    void define_tier(const std::string& name, double multiplier);

    // --- assignment and grants ---
    void assign_user(const std::string& user_id, const std::string& role_id,
                     const std::string& tier = "basic");
    void revoke_user(const std::string& user_id, const std::string& role_id);
    void grant_permission_to_role(const std::string& role_id, const Permission& p);
    void grant_permission_to_user(const std::string& user_id, const Permission& p);
    void add_inheritance(const std::string& senior, const std::string& junior);
    void add_ssd_pair(const std::string& r1, const std::string& r2);
    void add_dsd_pair(const std::string& r1, const std::string& r2);

    // --- sessions ---
    Session create_session(const std::string& user_id, const std::string& credential,
                           const std::set<std::string>& requested_roles);
    void revoke_session(const std::string& session_id);
    void activate_role(const std::string& session_id, const std::string& role_id);
    void deactivate_role(const std::string& session_id, const std::string& role_id);

    // --- queries ---
    Decision check_access(const std::string& session_id, Action action,
                          const Resource& resource) const;
    std::set<Permission> effective_permissions(const std::string& user_id,
                                               const std::set<std::string>& active_roles) const;
    std::optional<Session> lookup_session(const std::string& session_id) const;
    std::size_t member_count(const std::string& role_id) const;
    std::vector<std::string> assigned_roles(const std::string& user_id) const;
    // (role default quota, tier multiplier) per assignment, sorted by role id.
    std::vector<std::pair<QuotaPolicy, double>> assignment_quotas(const std::string& user_id) const;
    double max_tier_multiplier(const std::string& user_id) const;
    bool user_exists(const std::string& user_id) const;
    std::optional<Role> find_role(const std::string& name) const;
    std::map<std::string, double> tiers() const;

    // --- persistence hooks ---
    PolicyData export_state() const;
    void import_state(const PolicyData& data);

private:
    std::set<std::string> role_closure_locked(const std::set<std::string>& starts) const;
    std::set<Permission> effective_permissions_locked(const User& user,
                                                      const std::set<std::string>& roles) const;
    bool would_cycle_locked(const std::string& senior, const std::string& junior) const;
    bool session_live_locked(const Session& s) const;
    const Role& role_or_throw_locked(const std::string& name) const;
    const User& user_or_throw_locked(const std::string& id) const;

    const Clock& clock_;
    std::uint32_t session_ttl_;

    mutable std::shared_mutex mu_;
    PolicyData data_;
    std::map<std::string, std::set<std::string>> members_;   // role -> users
    std::map<std::string, Session> sessions_;
};

RolePair make_role_pair(const std::string& a, const std::string& b);

}  // namespace blobgate
