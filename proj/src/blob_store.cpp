#include <mutex>

#include "blobgate/blob_store.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "blobgate/digest.hpp"
#include "blobgate/textenc.hpp"

namespace fs = std::filesystem;

namespace blobgate {

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<std::string> try_read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// write-temp-then-rename; the rename is the commit point
void atomic_write(const fs::path& p, std::string_view content) {
    fs::path tmp = p;
    tmp += ".tmp." + random_token_hex(4);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::IoError, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error(Errc::IoError, "short write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, p, ec);
    if (ec) throw Error(Errc::IoError, "rename failed: " + ec.message());
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

constexpr const char* kManifestHeader = "blobgate-manifest 1";
constexpr const char* kStagedHeader = "blobgate-staged 1";

}  // namespace

bool valid_account_name(const std::string& name) {
    if (name.size() < 3 || name.size() > 24) return false;
    // reserved route prefixes and the policy admin scope
    if (name == "admin" || name == "auth" || name == "quota" || name == "policy") return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    });
}

bool valid_container_name(const std::string& name) {
    if (name.size() < 3 || name.size() > 63) return false;
    if (name.front() == '-' || name.back() == '-') return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
    });
}

bool valid_blob_name(const std::string& name) {
    if (name.empty() || name.size() > 1024) return false;
    return std::none_of(name.begin(), name.end(), [](char c) {
        auto u = static_cast<unsigned char>(c);
        return u < 0x20 || u == 0x7f;
    });
}

std::uint64_t BlobStore::Blob::staged_bytes() const {
    std::uint64_t n = 0;
    for (const auto& [_, ref] : staged) n += ref.size;
    return n;
}

std::uint64_t BlobStore::Blob::charged_bytes() const {
    if (type == BlobMeta::Type::Page) return declared_size;
    return committed_size + staged_bytes();
}

BlobStore::BlobStore(BlobStoreConfig config) : config_(std::move(config)) {
    fs::create_directories(config_.data_dir);
}

BlobStore::Account& BlobStore::account_or_throw(const std::string& name) {
    auto it = accounts_.find(name);
    if (it == accounts_.end()) throw Error(Errc::NoSuchAccount, name);
    return it->second;
}

const BlobStore::Account& BlobStore::account_or_throw(const std::string& name) const {
    auto it = accounts_.find(name);
    if (it == accounts_.end()) throw Error(Errc::NoSuchAccount, name);
    return it->second;
}

BlobStore::Container& BlobStore::container_or_throw(Account& a, const std::string&,
                                                    const std::string& name) {
    auto it = a.containers.find(name);
    if (it == a.containers.end()) throw Error(Errc::NoSuchContainer, name);
    return it->second;
}

const BlobStore::Container& BlobStore::container_or_throw(const Account& a, const std::string&,
                                                          const std::string& name) const {
    auto it = a.containers.find(name);
    if (it == a.containers.end()) throw Error(Errc::NoSuchContainer, name);
    return it->second;
}

const BlobStore::Blob& BlobStore::blob_or_throw(const Container& c,
                                                const std::string& name) const {
    auto it = c.blobs.find(name);
    if (it == c.blobs.end()) throw Error(Errc::NoSuchBlob, name);
    return it->second;
}

fs::path BlobStore::blob_dir(const std::string& account, const std::string& container,
                             const std::string& blob) const {
    // Blob names may be up to 1024 bytes and contain '/', so the directory is
    // keyed by the name's digest; the manifest records the real name.
    return config_.data_dir / account / container / sha256_hex(blob);
}

// --- accounts ---

void BlobStore::create_account(const std::string& name, std::uint64_t size_cap_bytes) {
    if (!valid_account_name(name)) throw Error(Errc::InvalidName, name);
    if (size_cap_bytes == 0) throw Error(Errc::InvalidArgument, "zero account cap");
    std::unique_lock lk(mu_);
    if (accounts_.count(name)) throw Error(Errc::DuplicateAccount, name);
    fs::create_directories(config_.data_dir / name);
    accounts_[name] = Account{size_cap_bytes, 0, {}};
}

std::pair<std::uint64_t, std::uint64_t> BlobStore::account_usage(const std::string& name) const {
    std::shared_lock lk(mu_);
    const Account& a = account_or_throw(name);
    return {a.used, a.cap};
}

std::vector<std::pair<std::string, std::uint64_t>> BlobStore::export_accounts() const {
    std::shared_lock lk(mu_);
    std::vector<std::pair<std::string, std::uint64_t>> out;
    for (const auto& [name, a] : accounts_) out.emplace_back(name, a.cap);
    return out;
}

void BlobStore::restore_accounts(
    const std::vector<std::pair<std::string, std::uint64_t>>& accounts) {
    std::unique_lock lk(mu_);
    accounts_.clear();
    for (const auto& [name, cap] : accounts) {
        accounts_[name] = Account{cap, 0, {}};
        fs::create_directories(config_.data_dir / name);
    }
    scan_disk();
}

// --- containers ---

void BlobStore::create_container(const std::string& account, const std::string& name) {
    if (!valid_container_name(name)) throw Error(Errc::InvalidName, name);
    std::unique_lock lk(mu_);
    Account& a = account_or_throw(account);
    if (a.containers.count(name)) throw Error(Errc::DuplicateContainer, name);
    fs::create_directories(config_.data_dir / account / name);
    a.containers[name] = Container{};
}

void BlobStore::delete_container(const std::string& account, const std::string& name,
                                 bool force) {
    std::unique_lock lk(mu_);
    Account& a = account_or_throw(account);
    auto it = a.containers.find(name);
    if (it == a.containers.end()) throw Error(Errc::NoSuchContainer, name);
    if (!it->second.blobs.empty() && !force) throw Error(Errc::ContainerNotEmpty, name);
    for (const auto& [_, b] : it->second.blobs) a.used -= b.charged_bytes();
    fs::remove_all(config_.data_dir / account / name);
    a.containers.erase(it);
}

std::vector<std::string> BlobStore::list_containers(const std::string& account) const {
    std::shared_lock lk(mu_);
    const Account& a = account_or_throw(account);
    std::vector<std::string> out;
    for (const auto& [name, _] : a.containers) out.push_back(name);
    return out;
}

// --- manifest I/O ---

void BlobStore::write_committed_manifest(const fs::path& dir, const Blob& b) const {
    std::ostringstream ss;
    ss << kManifestHeader << "\n"
       << "type block\n"
       << "name " << escape_token(b.name) << "\n"
       << "etag " << b.etag << "\n"
       << "size " << b.committed_size << "\n"
       << "hash " << b.content_hash << "\n"
       << "blocks " << b.committed_blocks.size() << "\n";
    for (const auto& ref : b.committed_blocks)
        ss << escape_token(ref.id) << " " << ref.size << " " << ref.payload_digest << "\n";
    atomic_write(dir / "manifest", ss.str());
}

void BlobStore::write_page_manifest(const fs::path& dir, const Blob& b) const {
    std::ostringstream ss;
    ss << kManifestHeader << "\n"
       << "type page\n"
       << "name " << escape_token(b.name) << "\n"
       << "etag " << b.etag << "\n"
       << "declared_size " << b.declared_size << "\n";
    atomic_write(dir / "manifest", ss.str());
}

void BlobStore::write_staged_manifest(const fs::path& dir, const Blob& b) const {
    std::ostringstream ss;
    ss << kStagedHeader << "\n";
    ss << "name " << escape_token(b.name) << "\n";
    for (const auto& [id, ref] : b.staged)
        ss << escape_token(id) << " " << ref.size << " " << ref.payload_digest << "\n";
    atomic_write(dir / "staged", ss.str());
}

std::optional<BlobStore::Blob> BlobStore::load_blob_dir(const fs::path& dir) const {
    Blob b;
    bool have_any = false;
    if (auto text = try_read_file(dir / "manifest")) {
        std::istringstream in(*text);
        std::string line;
        if (!std::getline(in, line) || line != kManifestHeader) return std::nullopt;
        std::map<std::string, std::string> kv;
        std::vector<std::string> block_lines;
        std::size_t expected_blocks = 0;
        bool in_blocks = false;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (!in_blocks) {
                auto sp = line.find(' ');
                if (sp == std::string::npos) return std::nullopt;
                std::string key = line.substr(0, sp);
                std::string val = line.substr(sp + 1);
                if (key == "blocks") {
                    expected_blocks = std::stoull(val);
                    in_blocks = true;
                } else {
                    kv[key] = val;
                }
            } else {
                block_lines.push_back(line);
            }
        }
        auto name = unescape_token(kv["name"]);
        if (!name) return std::nullopt;
        b.name = *name;
        b.etag = kv["etag"];
        if (kv["type"] == "page") {
            b.type = BlobMeta::Type::Page;
            b.declared_size = std::stoull(kv["declared_size"]);
            std::error_code ec;
            for (const auto& entry : fs::directory_iterator(dir / "pages", ec)) {
                std::uint64_t idx = 0;
                try {
                    idx = std::stoull(entry.path().filename().string());
                } catch (...) {
                    continue;
                }
                if (idx * kPageSize < b.declared_size) b.written_pages.insert(idx);
            }
        } else {
            b.type = BlobMeta::Type::Block;
            b.committed = true;
            b.committed_size = std::stoull(kv["size"]);
            b.content_hash = kv["hash"];
            if (block_lines.size() != expected_blocks) return std::nullopt;
            for (const auto& bl : block_lines) {
                auto parts = split_ws(bl);
                if (parts.size() != 3) return std::nullopt;
                auto id = unescape_token(parts[0]);
                if (!id) return std::nullopt;
                b.committed_blocks.push_back({*id, std::stoull(parts[1]), parts[2]});
            }
        }
        have_any = true;
    }
    if (auto text = try_read_file(dir / "staged")) {
        std::istringstream in(*text);
        std::string line;
        if (std::getline(in, line) && line == kStagedHeader) {
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                auto parts = split_ws(line);
                if (parts.size() == 2 && parts[0] == "name") {
                    if (auto n = unescape_token(parts[1]); n && b.name.empty()) b.name = *n;
                    continue;
                }
                if (parts.size() != 3) continue;
                auto id = unescape_token(parts[0]);
                if (!id) continue;
                // a staged entry is only real if its payload file survived
                if (!fs::exists(dir / "staged_blocks" / parts[2])) continue;
                b.staged[*id] = BlockRef{*id, std::stoull(parts[1]), parts[2]};
            }
            if (!b.staged.empty() || have_any) have_any = true;
        }
    }
    if (!have_any || b.name.empty()) return std::nullopt;
    return b;
}

void BlobStore::gc_block_files(const fs::path& dir, const Blob& b) const {
    std::set<std::string> keep;
    for (const auto& ref : b.committed_blocks) keep.insert(ref.payload_digest);
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir / "blocks", ec))
        if (!keep.count(entry.path().filename().string())) fs::remove(entry.path(), ec);
    std::set<std::string> keep_staged;
    for (const auto& [_, ref] : b.staged) keep_staged.insert(ref.payload_digest);
    for (const auto& entry : fs::directory_iterator(dir / "staged_blocks", ec))
        if (!keep_staged.count(entry.path().filename().string())) fs::remove(entry.path(), ec);
}

void BlobStore::scan_disk() {
    for (auto& [acct_name, acct] : accounts_) {
        fs::path acct_dir = config_.data_dir / acct_name;
        std::error_code ec;
        for (const auto& cont_entry : fs::directory_iterator(acct_dir, ec)) {
            if (!cont_entry.is_directory()) continue;
            std::string cont_name = cont_entry.path().filename().string();
            if (!valid_container_name(cont_name)) continue;
            Container cont;
            for (const auto& blob_entry : fs::directory_iterator(cont_entry.path(), ec)) {
                if (!blob_entry.is_directory()) continue;
                auto loaded = load_blob_dir(blob_entry.path());
                if (!loaded) {
                    std::cerr << "blobgate: skipping unreadable blob dir "
                              << blob_entry.path() << "\n";
                    continue;
                }
                acct.used += loaded->charged_bytes();
                cont.blobs[loaded->name] = std::move(*loaded);
            }
            acct.containers[cont_name] = std::move(cont);
        }
    }
}

// --- block blobs ---

void BlobStore::put_block(const std::string& account, const std::string& container,
                          const std::string& blob, const std::string& block_id,
                          std::string_view bytes) {
    if (!valid_blob_name(blob)) throw Error(Errc::InvalidName, "blob name");
    if (block_id.empty() || block_id.size() > 64) throw Error(Errc::InvalidBlockId);
    if (bytes.size() > config_.max_block_size) throw Error(Errc::BlockTooLarge);
    std::unique_lock lk(mu_);
    Account& a = account_or_throw(account);
    Container& c = container_or_throw(a, account, container);
    Blob* existing = nullptr;
    if (auto it = c.blobs.find(blob); it != c.blobs.end()) {
        if (it->second.type == BlobMeta::Type::Page)
            throw Error(Errc::InvalidArgument, "page blob cannot take blocks");
        existing = &it->second;
    }
    std::uint64_t replaced = 0;
    if (existing) {
        auto sit = existing->staged.find(block_id);
        if (sit != existing->staged.end()) replaced = sit->second.size;
    }
    if (a.used - replaced + bytes.size() > a.cap) throw Error(Errc::AccountCapExceeded);

    fs::path dir = blob_dir(account, container, blob);
    fs::create_directories(dir / "staged_blocks");
    fs::create_directories(dir / "blocks");
    std::string digest = sha256_hex(bytes);
    atomic_write(dir / "staged_blocks" / digest, bytes);

    Blob& b = existing ? *existing : c.blobs[blob];
    if (!existing) {
        // no etag until commit: an uncommitted blob is invisible to stat, and
        // a stage-time etag would not survive a restart
        b.type = BlobMeta::Type::Block;
        b.name = blob;
    }
    b.staged[block_id] = BlockRef{block_id, bytes.size(), digest};
    write_staged_manifest(dir, b);
    gc_block_files(dir, b);
    a.used = a.used - replaced + bytes.size();
}

std::pair<std::string, std::string> BlobStore::commit_block_list(
    const std::string& account, const std::string& container, const std::string& blob,
    const std::vector<std::string>& ids) {
    std::unique_lock lk(mu_);
    Account& a = account_or_throw(account);
    Container& c = container_or_throw(a, account, container);
    auto bit = c.blobs.find(blob);
    if (bit == c.blobs.end()) throw Error(Errc::MissingBlock, ids.empty() ? "" : ids.front());
    Blob& b = bit->second;
    if (b.type == BlobMeta::Type::Page)
        throw Error(Errc::InvalidArgument, "page blob cannot be committed");

    std::vector<BlockRef> new_refs;
    std::uint64_t new_size = 0;
    for (const auto& id : ids) {
        const BlockRef* ref = nullptr;
        if (auto sit = b.staged.find(id); sit != b.staged.end()) {
            ref = &sit->second;
        } else {
            for (const auto& r : b.committed_blocks)
                if (r.id == id) {
                    ref = &r;
                    break;
                }
        }
        if (!ref) throw Error(Errc::MissingBlock, id);
        new_refs.push_back(*ref);
        new_size += ref->size;
    }
    if (new_size > config_.block_blob_cap) throw Error(Errc::BlobTooLarge);
    std::uint64_t old_charge = b.charged_bytes();
    if (a.used - old_charge + new_size > a.cap) throw Error(Errc::AccountCapExceeded);

    fs::path dir = blob_dir(account, container, blob);
    fs::create_directories(dir / "blocks");
    // promote staged payloads into the committed block area
    for (const auto& ref : new_refs) {
        fs::path src = dir / "staged_blocks" / ref.payload_digest;
        fs::path dst = dir / "blocks" / ref.payload_digest;
        if (fs::exists(dst)) continue;
        if (fs::exists(src)) {
            std::error_code ec;
            fs::copy_file(src, dst, fs::copy_options::overwrite_existing, ec);
            if (ec) throw Error(Errc::IoError, ec.message());
        } else {
            throw Error(Errc::MissingBlock, ref.id);
        }
    }
    Sha256 hasher;
    for (const auto& ref : new_refs) hasher.update(read_file(dir / "blocks" / ref.payload_digest));
    std::string hash = hasher.finish_hex();
    std::string etag = random_token_hex(8);

    Blob updated = b;
    updated.committed = true;
    updated.committed_blocks = new_refs;
    updated.committed_size = new_size;
    updated.content_hash = hash;
    updated.etag = etag;
    updated.staged.clear();
    write_committed_manifest(dir, updated);  // commit point
    write_staged_manifest(dir, updated);
    gc_block_files(dir, updated);

    a.used = a.used - old_charge + new_size;
    b = std::move(updated);
    return {etag, hash};
}

std::pair<std::string, std::string> BlobStore::put_blob(const std::string& account,
                                                        const std::string& container,
                                                        const std::string& blob,
                                                        std::string_view bytes) {
    if (!valid_blob_name(blob)) throw Error(Errc::InvalidName, "blob name");
    std::unique_lock lk(mu_);
    Account& a = account_or_throw(account);
    Container& c = container_or_throw(a, account, container);
    if (bytes.size() > config_.block_blob_cap) throw Error(Errc::BlobTooLarge);
    std::uint64_t old_charge = 0;
    if (auto it = c.blobs.find(blob); it != c.blobs.end()) old_charge = it->second.charged_bytes();
    if (a.used - old_charge + bytes.size() > a.cap) throw Error(Errc::AccountCapExceeded);

    fs::path dir = blob_dir(account, container, blob);
    fs::create_directories(dir / "blocks");
    fs::create_directories(dir / "staged_blocks");
    std::string digest = sha256_hex(bytes);
    atomic_write(dir / "blocks" / digest, bytes);

    Blob b;
    b.type = BlobMeta::Type::Block;
    b.name = blob;
    b.committed = true;
    b.committed_blocks = {BlockRef{"0", bytes.size(), digest}};
    b.committed_size = bytes.size();
    b.content_hash = digest;
    b.etag = random_token_hex(8);
    write_committed_manifest(dir, b);
    write_staged_manifest(dir, b);
    gc_block_files(dir, b);

    a.used = a.used - old_charge + bytes.size();
    c.blobs[blob] = b;
    return {b.etag, b.content_hash};
}

// --- page blobs ---

std::string BlobStore::create_page_blob(const std::string& account, const std::string& container,
                                        const std::string& blob, std::uint64_t declared_size) {
    if (!valid_blob_name(blob)) throw Error(Errc::InvalidName, "blob name");
    if (declared_size % kPageSize != 0) throw Error(Errc::SizeNotAligned);
    if (declared_size > config_.page_blob_cap) throw Error(Errc::BlobTooLarge);
    std::unique_lock lk(mu_);
    Account& a = account_or_throw(account);
    Container& c = container_or_throw(a, account, container);
    std::uint64_t old_charge = 0;
    if (auto it = c.blobs.find(blob); it != c.blobs.end()) old_charge = it->second.charged_bytes();
    // declared size is charged in full at creation
    if (a.used - old_charge + declared_size > a.cap) throw Error(Errc::AccountCapExceeded);

    fs::path dir = blob_dir(account, container, blob);
    std::error_code ec;
    fs::remove_all(dir, ec);
    fs::create_directories(dir / "pages");

    Blob b;
    b.type = BlobMeta::Type::Page;
    b.name = blob;
    b.declared_size = declared_size;
    b.etag = random_token_hex(8);
    write_page_manifest(dir, b);

    a.used = a.used - old_charge + declared_size;
    c.blobs[blob] = b;
    return b.etag;
}

std::string BlobStore::put_pages(const std::string& account, const std::string& container,
                                 const std::string& blob, std::uint64_t offset,
                                 std::string_view bytes) {
    if (offset % kPageSize != 0 || bytes.size() % kPageSize != 0) throw Error(Errc::NotAligned);
    std::unique_lock lk(mu_);
    Account& a = account_or_throw(account);
    Container& c = container_or_throw(a, account, container);
    auto it = c.blobs.find(blob);
    if (it == c.blobs.end()) throw Error(Errc::NoSuchBlob, blob);
    Blob& b = it->second;
    if (b.type != BlobMeta::Type::Page) throw Error(Errc::InvalidArgument, "not a page blob");
    if (offset + bytes.size() > b.declared_size) throw Error(Errc::RangeOutOfBounds);

    fs::path dir = blob_dir(account, container, blob);
    for (std::uint64_t i = 0; i < bytes.size() / kPageSize; ++i) {
        std::uint64_t idx = offset / kPageSize + i;
        atomic_write(dir / "pages" / std::to_string(idx),
                     bytes.substr(i * kPageSize, kPageSize));
        b.written_pages.insert(idx);
    }
    b.etag = random_token_hex(8);
    write_page_manifest(dir, b);
    return b.etag;
}

std::string BlobStore::clear_pages(const std::string& account, const std::string& container,
                                   const std::string& blob, std::uint64_t offset,
                                   std::uint64_t length) {
    if (offset % kPageSize != 0 || length % kPageSize != 0) throw Error(Errc::NotAligned);
    std::unique_lock lk(mu_);
    Account& a = account_or_throw(account);
    Container& c = container_or_throw(a, account, container);
    auto it = c.blobs.find(blob);
    if (it == c.blobs.end()) throw Error(Errc::NoSuchBlob, blob);
    Blob& b = it->second;
    if (b.type != BlobMeta::Type::Page) throw Error(Errc::InvalidArgument, "not a page blob");
    if (offset + length > b.declared_size) throw Error(Errc::RangeOutOfBounds);

    fs::path dir = blob_dir(account, container, blob);
    std::error_code ec;
    for (std::uint64_t idx = offset / kPageSize; idx < (offset + length) / kPageSize; ++idx) {
        fs::remove(dir / "pages" / std::to_string(idx), ec);
        b.written_pages.erase(idx);
    }
    b.etag = random_token_hex(8);
    write_page_manifest(dir, b);
    return b.etag;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> BlobStore::get_page_ranges(
    const std::string& account, const std::string& container, const std::string& blob) const {
    std::shared_lock lk(mu_);
    const Account& a = account_or_throw(account);
    const Container& c = container_or_throw(a, account, container);
    const Blob& b = blob_or_throw(c, blob);
    if (b.type != BlobMeta::Type::Page) throw Error(Errc::InvalidArgument, "not a page blob");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (std::uint64_t idx : b.written_pages) {
        std::uint64_t start = idx * kPageSize, end = start + kPageSize;
        if (!out.empty() && out.back().second == start)
            out.back().second = end;
        else
            out.emplace_back(start, end);
    }
    return out;
}

// --- common ---

std::string BlobStore::get_blob(const std::string& account, const std::string& container,
                                const std::string& blob,
                                std::optional<std::pair<std::uint64_t, std::uint64_t>> range) const {
    std::shared_lock lk(mu_);
    const Account& a = account_or_throw(account);
    const Container& c = container_or_throw(a, account, container);
    const Blob& b = blob_or_throw(c, blob);
    if (b.type == BlobMeta::Type::Block && !b.committed) throw Error(Errc::NoSuchBlob, blob);

    std::uint64_t size = b.type == BlobMeta::Type::Page ? b.declared_size : b.committed_size;
    std::uint64_t start = 0, end = size;
    if (range) {
        start = range->first;
        end = range->second;
        if (start > end || end > size) throw Error(Errc::RangeOutOfBounds);
    }
    fs::path dir = blob_dir(account, container, blob);
    std::string out;
    out.reserve(end - start);
    if (b.type == BlobMeta::Type::Block) {
        std::uint64_t pos = 0;
        for (const auto& ref : b.committed_blocks) {
            std::uint64_t bstart = pos, bend = pos + ref.size;
            pos = bend;
            if (bend <= start) continue;
            if (bstart >= end) break;
            std::string payload = read_file(dir / "blocks" / ref.payload_digest);
            std::uint64_t lo = start > bstart ? start - bstart : 0;
            std::uint64_t hi = end < bend ? end - bstart : ref.size;
            out.append(payload, lo, hi - lo);
        }
    } else {
        for (std::uint64_t p = start; p < end;) {
            std::uint64_t idx = p / kPageSize;
            std::uint64_t page_off = p % kPageSize;
            std::uint64_t take = std::min(kPageSize - page_off, end - p);
            if (b.written_pages.count(idx)) {
                std::string payload = read_file(dir / "pages" / std::to_string(idx));
                payload.resize(kPageSize, '\0');  // unwritten tail reads as zeros
                out.append(payload, page_off, take);
            } else {
                out.append(take, '\0');
            }
            p += take;
        }
    }
    return out;
}

BlobMeta BlobStore::stat_blob(const std::string& account, const std::string& container,
                              const std::string& blob) const {
    std::shared_lock lk(mu_);
    const Account& a = account_or_throw(account);
    const Container& c = container_or_throw(a, account, container);
    const Blob& b = blob_or_throw(c, blob);
    if (b.type == BlobMeta::Type::Block && !b.committed) throw Error(Errc::NoSuchBlob, blob);
    BlobMeta m;
    m.type = b.type;
    m.name = b.name;
    m.etag = b.etag;
    m.size = b.type == BlobMeta::Type::Page ? b.declared_size : b.committed_size;
    m.content_hash = b.content_hash;
    return m;
}

void BlobStore::delete_blob(const std::string& account, const std::string& container,
                            const std::string& blob) {
    std::unique_lock lk(mu_);
    Account& a = account_or_throw(account);
    Container& c = container_or_throw(a, account, container);
    auto it = c.blobs.find(blob);
    if (it == c.blobs.end()) throw Error(Errc::NoSuchBlob, blob);
    a.used -= it->second.charged_bytes();
    std::error_code ec;
    fs::remove_all(blob_dir(account, container, blob), ec);
    c.blobs.erase(it);
}

ListPage BlobStore::list_blobs(const std::string& account, const std::string& container,
                               const std::string& prefix, const std::string& marker,
                               std::size_t max_results) const {
    std::shared_lock lk(mu_);
    const Account& a = account_or_throw(account);
    const Container& c = container_or_throw(a, account, container);
    ListPage page;
    for (const auto& [name, b] : c.blobs) {
        if (b.type == BlobMeta::Type::Block && !b.committed) continue;
        if (!prefix.empty() && name.compare(0, prefix.size(), prefix) != 0) continue;
        if (!marker.empty() && name <= marker) continue;
        if (max_results > 0 && page.items.size() == max_results) {
            page.next_marker = page.items.back().name;
            return page;
        }
        BlobMeta m;
        m.type = b.type;
        m.name = name;
        m.etag = b.etag;
        m.size = b.type == BlobMeta::Type::Page ? b.declared_size : b.committed_size;
        m.content_hash = b.content_hash;
        page.items.push_back(std::move(m));
    }
    return page;
}

std::string BlobStore::state_digest() const {
    std::shared_lock lk(mu_);
    Sha256 h;
    for (const auto& [aname, a] : accounts_) {
        h.update(aname);
        h.update(std::to_string(a.cap) + "," + std::to_string(a.used) + ";");
        for (const auto& [cname, c] : a.containers) {
            h.update(cname + "{");
            for (const auto& [bname, b] : c.blobs) {
                h.update(escape_token(bname) + ":" + b.etag + ":" +
                         std::to_string(b.committed_size) + ":" + b.content_hash + ":" +
                         std::to_string(b.declared_size) + ":");
                for (const auto& [id, ref] : b.staged)
                    h.update(escape_token(id) + "=" + ref.payload_digest + ",");
                for (auto p : b.written_pages) h.update(std::to_string(p) + ",");
                h.update("|");
            }
            h.update("}");
        }
    }
    return h.finish_hex();
}

}  // namespace blobgate
