#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "blobgate/errors.hpp"

namespace blobgate {

struct BlobStoreConfig {
    std::filesystem::path data_dir;
    std::uint64_t max_block_size = 4ull << 20;          // 4 MiB
    std::uint64_t block_blob_cap = 200ull << 30;        // 200 GB
    std::uint64_t page_blob_cap = 1ull << 40;           // 1 TB
    std::uint64_t default_account_cap = 100ull << 40;   // 100 TB
};

constexpr std::uint64_t kPageSize = 512;

struct BlobMeta {
    enum class Type { Block, Page } type = Type::Block;
    std::string name;
    std::string etag;
    std::uint64_t size = 0;          // committed size (block) or declared size (page)
    std::string content_hash;        // block blobs only, digest of committed content
};

struct ListPage {
    std::vector<BlobMeta> items;
    std::optional<std::string> next_marker;
};

// Disk-backed blob namespace: accounts -> containers -> blobs. Block blobs
// are assembled from content-addressed staged blocks; page blobs are sparse
// maps of 512-byte pages. Every metadata update goes through an atomic
// write-temp-then-rename, so a kill at any point leaves the previous
// committed state loadable.
class BlobStore {
public:
    explicit BlobStore(BlobStoreConfig config);

    const BlobStoreConfig& config() const { return config_; }

    // --- accounts ---
    void create_account(const std::string& name, std::uint64_t size_cap_bytes);
    std::pair<std::uint64_t, std::uint64_t> account_usage(const std::string& name) const;
    std::vector<std::pair<std::string, std::uint64_t>> export_accounts() const;
    // Restores the account registry from a snapshot, then rebuilds the
    // in-memory index from whatever blob state the data directory holds.
    void restore_accounts(const std::vector<std::pair<std::string, std::uint64_t>>& accounts);

    // --- containers ---
    void create_container(const std::string& account, const std::string& name);
    void delete_container(const std::string& account, const std::string& name, bool force);
    std::vector<std::string> list_containers(const std::string& account) const;

    // --- block blobs ---
    void put_block(const std::string& account, const std::string& container,
                   const std::string& blob, const std::string& block_id, std::string_view bytes);
    std::pair<std::string, std::string> commit_block_list(const std::string& account,
                                                          const std::string& container,
                                                          const std::string& blob,
                                                          const std::vector<std::string>& ids);
    std::pair<std::string, std::string> put_blob(const std::string& account,
                                                 const std::string& container,
                                                 const std::string& blob, std::string_view bytes);

    // --- page blobs ---
    std::string create_page_blob(const std::string& account, const std::string& container,
                                 const std::string& blob, std::uint64_t declared_size);
    std::string put_pages(const std::string& account, const std::string& container,
                          const std::string& blob, std::uint64_t offset, std::string_view bytes);
    std::string clear_pages(const std::string& account, const std::string& container,
                            const std::string& blob, std::uint64_t offset, std::uint64_t length);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> get_page_ranges(
        const std::string& account, const std::string& container, const std::string& blob) const;

    // --- common ---
    std::string get_blob(const std::string& account, const std::string& container,
                         const std::string& blob,
                         std::optional<std::pair<std::uint64_t, std::uint64_t>> range = {}) const;
    BlobMeta stat_blob(const std::string& account, const std::string& container,
                       const std::string& blob) const;
    void delete_blob(const std::string& account, const std::string& container,
                     const std::string& blob);
    ListPage list_blobs(const std::string& account, const std::string& container,
                        const std::string& prefix, const std::string& marker,
                        std::size_t max_results) const;

    // Digest over the full namespace state (metadata + content hashes).
    // Used by tests to prove a request had no side effects.
    std::string state_digest() const;

private:
    struct BlockRef {
        std::string id;
        std::uint64_t size = 0;
        std::string payload_digest;  // content-addressed file name under blocks/
    };

    struct Blob {
        BlobMeta::Type type = BlobMeta::Type::Block;
        std::string name;
        std::string etag;
        bool committed = false;                       // block blobs: has a manifest
        std::vector<BlockRef> committed_blocks;
        std::uint64_t committed_size = 0;
        std::string content_hash;
        std::map<std::string, BlockRef> staged;       // block id -> staged payload
        std::uint64_t declared_size = 0;              // page blobs
        std::set<std::uint64_t> written_pages;

        std::uint64_t charged_bytes() const;
        std::uint64_t staged_bytes() const;
    };

    struct Container {
        std::map<std::string, Blob> blobs;
    };

    struct Account {
        std::uint64_t cap = 0;
        std::uint64_t used = 0;
        std::map<std::string, Container> containers;
    };

    Account& account_or_throw(const std::string& name);
    const Account& account_or_throw(const std::string& name) const;
    Container& container_or_throw(Account& a, const std::string& account,
                                  const std::string& name);
    const Container& container_or_throw(const Account& a, const std::string& account,
                                        const std::string& name) const;
    const Blob& blob_or_throw(const Container& c, const std::string& name) const;

    std::filesystem::path blob_dir(const std::string& account, const std::string& container,
                                   const std::string& blob) const;
    void write_committed_manifest(const std::filesystem::path& dir, const Blob& b) const;
    void write_staged_manifest(const std::filesystem::path& dir, const Blob& b) const;
    void write_page_manifest(const std::filesystem::path& dir, const Blob& b) const;
    std::optional<Blob> load_blob_dir(const std::filesystem::path& dir) const;
    void gc_block_files(const std::filesystem::path& dir, const Blob& b) const;
    void scan_disk();

    BlobStoreConfig config_;
    mutable std::shared_mutex mu_;
    std::map<std::string, Account> accounts_;
};

bool valid_account_name(const std::string& name);
bool valid_container_name(const std::string& name);
bool valid_blob_name(const std::string& name);

}  // namespace blobgate
