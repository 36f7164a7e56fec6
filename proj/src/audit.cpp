#include <mutex>

#include "blobgate/audit.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iterator>

using nlohmann::json;

namespace blobgate {

namespace {

json to_json(const AuditRecord& r) {
    return json{{"ts", r.timestamp},     {"user", r.user},       {"action", r.action},
                {"resource", r.resource}, {"decision", r.decision}, {"reason", r.reason},
                {"request_id", r.request_id}};
}

AuditRecord from_json(const json& j) {
    AuditRecord r;
    r.timestamp = j.at("ts").get<std::int64_t>();
    r.user = j.at("user").get<std::string>();
    r.action = j.at("action").get<std::string>();
    r.resource = j.at("resource").get<std::string>();
    r.decision = j.at("decision").get<std::string>();
    r.reason = j.at("reason").get<std::string>();
    r.request_id = j.at("request_id").get<std::string>();
    return r;
}

}  // namespace

AuditLog::AuditLog(std::string path) : path_(std::move(path)) {
    auto parent = std::filesystem::path(path_).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    repair_torn_tail();
    out_.open(path_, std::ios::app);
    if (!out_) throw Error(Errc::AuditWriteFailed, "cannot open " + path_);
}

// A crash mid-append can leave a torn final line. Drop it before appending,
// so the tear never ends up in the middle of the file.
void AuditLog::repair_torn_tail() {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    in.close();
    if (content.empty()) return;
    std::size_t line_start = 0;
    auto last_nl = content.find_last_of('\n');
    std::string last_line;
    if (last_nl == std::string::npos) {
        last_line = content;
    } else if (last_nl + 1 < content.size()) {
        last_line = content.substr(last_nl + 1);
        line_start = last_nl + 1;
    } else {
        auto prev_nl = content.find_last_of('\n', last_nl - (last_nl > 0 ? 1 : 0));
        line_start = prev_nl == std::string::npos ? 0 : prev_nl + 1;
        if (last_nl >= line_start) last_line = content.substr(line_start, last_nl - line_start);
    }
    if (last_line.empty()) return;
    try {
        (void)from_json(json::parse(last_line));
        return;  // intact
    } catch (const json::exception&) {
    }
    std::filesystem::resize_file(path_, line_start);
}

void AuditLog::append(const AuditRecord& record) {
    std::lock_guard lk(mu_);
    AuditRecord r = record;
    // timestamps within one file are non-decreasing even if the clock steps back
    if (r.timestamp < last_ts_) r.timestamp = last_ts_;
    last_ts_ = r.timestamp;
    out_ << to_json(r).dump() << "\n";
    out_.flush();
    if (!out_) throw Error(Errc::AuditWriteFailed, path_);
}

AuditReplay AuditLog::replay(const std::string& path) {
    AuditReplay result;
    std::ifstream in(path);
    if (!in) return result;  // no log yet: empty stream
    std::string line;
    std::size_t line_no = 0;
    bool pending_tail = false;
    std::string tail;
    std::size_t tail_line = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            result.records.push_back(from_json(json::parse(line)));
        } catch (const json::exception&) {
            pending_tail = true;
            tail = line;
            tail_line = line_no;
            break;
        }
    }
    if (pending_tail) {
        // A torn final line is tolerated; anything malformed mid-file is not.
        if (in.peek() == std::ifstream::traits_type::eof()) {
            result.warning = "torn final line " + std::to_string(tail_line) + " ignored";
        } else {
            throw Error(Errc::MalformedAuditLine, "line " + std::to_string(tail_line));
        }
    }
    return result;
}

}  // namespace blobgate
