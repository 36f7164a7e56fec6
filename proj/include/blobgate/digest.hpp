#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace blobgate {

// Streaming SHA-256. Committed blob content is hashed block by block, so the
// digest never needs the whole payload in one buffer.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(std::string_view data);
    std::string finish_hex();

private:
    void* ctx_;
};

std::string sha256_hex(std::string_view data);

std::string to_hex(std::string_view bytes);

// Unbiased random token, 2*n_bytes hex chars. Used for session ids and etags.
std::string random_token_hex(std::size_t n_bytes = 16);

// Salted credential hashing: "salt_hex:digest_hex".
std::string hash_credential(std::string_view secret);
bool verify_credential(std::string_view secret, std::string_view stored);

}  // namespace blobgate
