#pragma once

// Test-only brute-force oracles. Deliberately written against the definitions
// rather than reusing the engine's code paths: reachability is computed with
// a Floyd-Warshall boolean matrix and pattern matching with a recursive
// matcher, so agreement with the engine is meaningful.

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "blobgate/permission.hpp"
#include "blobgate/policy_store.hpp"

namespace oracle {

// recursive restatement of: a wildcard in segment k matches any resource
// agreeing on segments 1..k-1
inline bool match_scope(const std::vector<std::string>& scope,
                        const std::vector<std::string>& res, std::size_t i = 0) {
    if (i == scope.size()) return i == res.size();
    if (scope[i] == "*") return true;
    if (i == res.size()) return false;
    if (scope[i] != res[i]) return false;
    return match_scope(scope, res, i + 1);
}

inline bool match_permission(const blobgate::Permission& p, blobgate::Action a,
                             const std::vector<std::string>& res) {
    return p.action == a && match_scope(p.scope, res);
}

// A randomized policy small enough to evaluate exhaustively.
struct PolicyModel {
    int n_roles = 0;
    std::vector<std::vector<bool>> edge;                 // senior -> junior
    std::vector<std::vector<blobgate::Permission>> role_perms;
    std::map<std::string, std::vector<blobgate::Permission>> user_direct;
    std::map<std::string, std::set<int>> user_roles;     // assignments

    std::string role_name(int i) const { return "r" + std::to_string(i); }

    // reflexive-transitive closure by Floyd-Warshall
    std::vector<std::vector<bool>> reach() const {
        auto r = edge;
        for (int i = 0; i < n_roles; ++i) r[i][i] = true;
        for (int k = 0; k < n_roles; ++k)
            for (int i = 0; i < n_roles; ++i)
                for (int j = 0; j < n_roles; ++j)
                    if (r[i][k] && r[k][j]) r[i][j] = true;
        return r;
    }

    // exhaustive union of direct permissions and every reachable role's set
    std::vector<blobgate::Permission> effective(const std::string& user,
                                                const std::set<int>& active) const {
        std::vector<blobgate::Permission> out;
        if (auto it = user_direct.find(user); it != user_direct.end()) out = it->second;
        auto r = reach();
        for (int start : active)
            for (int j = 0; j < n_roles; ++j)
                if (r[start][j])
                    for (const auto& p : role_perms[j]) out.push_back(p);
        return out;
    }

    bool grants(const std::string& user, const std::set<int>& active, blobgate::Action a,
                const std::vector<std::string>& res) const {
        for (const auto& p : effective(user, active))
            if (match_permission(p, a, res)) return true;
        return false;
    }
};

inline blobgate::Permission random_permission(std::mt19937& rng) {
    using blobgate::Action;
    static const Action actions[] = {Action::Read, Action::Write, Action::Delete,
                                     Action::List, Action::CreateContainer,
                                     Action::DeleteContainer, Action::Admin};
    static const char* accts[] = {"acc1", "acc2", "acc3"};
    static const char* conts[] = {"con1", "con2"};
    static const char* blobs[] = {"b1", "b2"};
    std::uniform_int_distribution<int> coin(0, 3);
    blobgate::Permission p;
    p.action = actions[rng() % 7];
    int depth = 1 + static_cast<int>(rng() % 3);
    auto seg = [&](const char* const* pool, int n) -> std::string {
        return coin(rng) == 0 ? "*" : pool[rng() % n];
    };
    p.scope.push_back(seg(accts, 3));
    if (depth >= 2) p.scope.push_back(seg(conts, 2));
    if (depth >= 3) p.scope.push_back(seg(blobs, 2));
    return p;
}

inline std::vector<std::vector<std::string>> probe_resources() {
    std::vector<std::vector<std::string>> out;
    for (const char* a : {"acc1", "acc2", "acc3", "accx"}) {
        out.push_back({a});
        for (const char* c : {"con1", "con2", "conx"}) {
            out.push_back({a, c});
            for (const char* b : {"b1", "b2", "bx"}) out.push_back({a, c, b});
        }
    }
    return out;
}

// Populates `store` with a random policy (roles, acyclic hierarchy,
// permissions, users, assignments, one session per user with a random
// activation subset) and returns the parallel brute-force model.
struct RandomSessions {
    PolicyModel model;
    // user -> (session token, active role indices)
    std::map<std::string, std::pair<std::string, std::set<int>>> sessions;
};

inline RandomSessions build_random_policy(blobgate::PolicyStore& store, std::mt19937& rng) {
    RandomSessions out;
    PolicyModel& m = out.model;
    m.n_roles = 1 + static_cast<int>(rng() % 12);
    m.edge.assign(m.n_roles, std::vector<bool>(m.n_roles, false));
    m.role_perms.resize(m.n_roles);
    for (int i = 0; i < m.n_roles; ++i)
        store.create_role(m.role_name(i), std::nullopt, blobgate::QuotaPolicy{});

    int n_edges = static_cast<int>(rng() % 21);
    for (int e = 0; e < n_edges; ++e) {
        int s = static_cast<int>(rng() % m.n_roles);
        int j = static_cast<int>(rng() % m.n_roles);
        try {
            store.add_inheritance(m.role_name(s), m.role_name(j));
            m.edge[s][j] = true;
        } catch (const blobgate::Error&) {
            // cycle or duplicate; the model mirrors only successful adds
        }
    }

    int n_perms = 1 + static_cast<int>(rng() % 30);
    for (int p = 0; p < n_perms; ++p) {
        auto perm = random_permission(rng);
        int role = static_cast<int>(rng() % m.n_roles);
        store.grant_permission_to_role(m.role_name(role), perm);
        m.role_perms[role].push_back(perm);
    }

    int n_users = 1 + static_cast<int>(rng() % 10);
    for (int u = 0; u < n_users; ++u) {
        std::string uid = "u" + std::to_string(u);
        store.create_user(uid, uid, "pw");
        m.user_roles[uid] = {};
        if (rng() % 3 == 0) {
            auto perm = random_permission(rng);
            store.grant_permission_to_user(uid, perm);
            m.user_direct[uid].push_back(perm);
        }
        int n_assign = static_cast<int>(rng() % 4);
        for (int a = 0; a < n_assign; ++a) {
            int role = static_cast<int>(rng() % m.n_roles);
            try {
                store.assign_user(uid, m.role_name(role));
                m.user_roles[uid].insert(role);
            } catch (const blobgate::Error&) {
            }
        }
        std::set<int> active;
        std::set<std::string> active_names;
        for (int r : m.user_roles[uid])
            if (rng() % 2 == 0) {
                active.insert(r);
                active_names.insert(m.role_name(r));
            }
        auto session = store.create_session(uid, "pw", active_names);
        out.sessions[uid] = {session.id, active};
    }
    return out;
}

}  // namespace oracle
