#include "blobgate/snapshot.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

#include "blobgate/digest.hpp"

using nlohmann::json;

namespace blobgate {

namespace {

constexpr const char* kDigestPrefix = "digest sha256 ";

json quota_to_json(const QuotaPolicy& q) {
    json j;
    j["window_seconds"] = q.window_seconds;
    if (q.base_limit)
        j["base_limit"] = *q.base_limit;
    else
        j["base_limit"] = nullptr;
    return j;
}

QuotaPolicy quota_from_json(const json& j) {
    QuotaPolicy q;
    q.window_seconds = j.at("window_seconds").get<std::uint32_t>();
    if (!j.at("base_limit").is_null()) q.base_limit = j.at("base_limit").get<std::uint64_t>();
    return q;
}

json permissions_to_json(const std::set<Permission>& perms) {
    json arr = json::array();
    for (const auto& p : perms) arr.push_back(p.to_string());
    return arr;
}

std::set<Permission> permissions_from_json(const json& arr) {
    std::set<Permission> out;
    for (const auto& item : arr) {
        auto p = Permission::parse(item.get<std::string>());
        if (!p) throw Error(Errc::CorruptSnapshot, "bad permission: " + item.get<std::string>());
        out.insert(*p);
    }
    return out;
}

json pairs_to_json(const std::set<RolePair>& pairs) {
    json arr = json::array();
    for (const auto& [a, b] : pairs) arr.push_back(json::array({a, b}));
    return arr;
}

std::set<RolePair> pairs_from_json(const json& arr) {
    std::set<RolePair> out;
    for (const auto& item : arr) out.insert({item.at(0).get<std::string>(),
                                             item.at(1).get<std::string>()});
    return out;
}

}  // namespace

void save_snapshot(const std::filesystem::path& file, const SnapshotData& data) {
    json j;
    j["format_version"] = kSnapshotFormatVersion;
    j["saved_at"] = data.saved_at;

    json users = json::array();
    for (const auto& [_, u] : data.policy.users)
        users.push_back({{"id", u.id},
                         {"display_name", u.display_name},
                         {"credential_hash", u.credential_hash},
                         {"direct_permissions", permissions_to_json(u.direct_permissions)}});
    j["users"] = users;

    json roles = json::array();
    for (const auto& [_, r] : data.policy.roles) {
        json jr = {{"name", r.name},
                   {"default_quota", quota_to_json(r.default_quota)},
                   {"permissions", permissions_to_json(r.permissions)}};
        jr["max_members"] = r.max_members ? json(*r.max_members) : json(nullptr);
        roles.push_back(jr);
    }
    j["roles"] = roles;

    j["tiers"] = data.policy.tiers;

    json assignments = json::array();
    for (const auto& [pair, tier] : data.policy.assignments)
        assignments.push_back({{"user", pair.first}, {"role", pair.second}, {"tier", tier}});
    j["assignments"] = assignments;

    j["hierarchy"] = pairs_to_json(data.policy.hierarchy);
    j["ssd_pairs"] = pairs_to_json(data.policy.ssd_pairs);
    j["dsd_pairs"] = pairs_to_json(data.policy.dsd_pairs);

    json overrides = json::object();
    for (const auto& [user, q] : data.quota_overrides) overrides[user] = quota_to_json(q);
    j["quota_overrides"] = overrides;

    json accounts = json::array();
    for (const auto& [name, cap] : data.accounts)
        accounts.push_back({{"name", name}, {"cap_bytes", cap}});
    j["accounts"] = accounts;

    std::string body = j.dump(2) + "\n";
    std::string content = body + kDigestPrefix + sha256_hex(body) + "\n";

    auto parent = file.parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::filesystem::path tmp = file;
    tmp += ".tmp." + random_token_hex(4);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::IoError, "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error(Errc::IoError, "short write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, file, ec);
    if (ec) throw Error(Errc::IoError, "rename failed: " + ec.message());
}

SnapshotData load_snapshot(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot read " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string content = ss.str();

    // split off the trailing digest line
    auto tail = content.rfind(kDigestPrefix);
    if (tail == std::string::npos) throw Error(Errc::CorruptSnapshot, "missing digest line");
    std::string body = content.substr(0, tail);
    std::string digest_line = content.substr(tail);
    while (!digest_line.empty() && (digest_line.back() == '\n' || digest_line.back() == '\r'))
        digest_line.pop_back();
    std::string recorded = digest_line.substr(std::string(kDigestPrefix).size());
    if (recorded != sha256_hex(body)) throw Error(Errc::CorruptSnapshot, "digest mismatch");

    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw Error(Errc::CorruptSnapshot, e.what());
    }
    int version = j.at("format_version").get<int>();
    if (version != kSnapshotFormatVersion)
        throw Error(Errc::UnsupportedVersion, "format_version " + std::to_string(version));

    SnapshotData data;
    data.saved_at = j.value("saved_at", std::int64_t{0});
    try {
        for (const auto& ju : j.at("users")) {
            User u;
            u.id = ju.at("id").get<std::string>();
            u.display_name = ju.at("display_name").get<std::string>();
            u.credential_hash = ju.at("credential_hash").get<std::string>();
            u.direct_permissions = permissions_from_json(ju.at("direct_permissions"));
            data.policy.users[u.id] = std::move(u);
        }
        for (const auto& jr : j.at("roles")) {
            Role r;
            r.name = jr.at("name").get<std::string>();
            if (!jr.at("max_members").is_null())
                r.max_members = jr.at("max_members").get<std::uint32_t>();
            r.default_quota = quota_from_json(jr.at("default_quota"));
            r.permissions = permissions_from_json(jr.at("permissions"));
            data.policy.roles[r.name] = std::move(r);
        }
        data.policy.tiers = j.at("tiers").get<std::map<std::string, double>>();
        for (const auto& ja : j.at("assignments"))
            data.policy.assignments[{ja.at("user").get<std::string>(),
                                     ja.at("role").get<std::string>()}] =
                ja.at("tier").get<std::string>();
        data.policy.hierarchy = pairs_from_json(j.at("hierarchy"));
        data.policy.ssd_pairs = pairs_from_json(j.at("ssd_pairs"));
        data.policy.dsd_pairs = pairs_from_json(j.at("dsd_pairs"));
        for (const auto& [user, jq] : j.at("quota_overrides").items())
            data.quota_overrides[user] = quota_from_json(jq);
        for (const auto& ja : j.at("accounts"))
            data.accounts.emplace_back(ja.at("name").get<std::string>(),
                                       ja.at("cap_bytes").get<std::uint64_t>());
    } catch (const json::exception& e) {
        throw Error(Errc::CorruptSnapshot, e.what());
    }
    return data;
}

}  // namespace blobgate
