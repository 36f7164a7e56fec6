#include "blobgate/digest.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <array>
#include <stdexcept>

namespace blobgate {

Sha256::Sha256() {
    auto* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 init failed");
    ctx_ = ctx;
}

Sha256::~Sha256() { EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_)); }

void Sha256::update(std::string_view data) {
    if (EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), data.data(), data.size()) != 1)
        throw std::runtime_error("sha256 update failed");
}

std::string Sha256::finish_hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> out{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(ctx_), out.data(), &len) != 1)
        throw std::runtime_error("sha256 final failed");
    return to_hex({reinterpret_cast<const char*>(out.data()), len});
}

std::string sha256_hex(std::string_view data) {
    Sha256 h;
    h.update(data);
    return h.finish_hex();
}

std::string to_hex(std::string_view bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

std::string random_token_hex(std::size_t n_bytes) {
    std::vector<unsigned char> buf(n_bytes);
    if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1)
        throw std::runtime_error("RAND_bytes failed");
    return to_hex({reinterpret_cast<const char*>(buf.data()), buf.size()});
}

std::string hash_credential(std::string_view secret) {
    std::string salt = random_token_hex(16);
    return salt + ":" + sha256_hex(salt + std::string(secret));
}

bool verify_credential(std::string_view secret, std::string_view stored) {
    auto sep = stored.find(':');
    if (sep == std::string_view::npos) return false;
    std::string salt(stored.substr(0, sep));
    std::string want(stored.substr(sep + 1));
    std::string got = sha256_hex(salt + std::string(secret));
    // constant-time compare
    if (got.size() != want.size()) return false;
    unsigned char diff = 0;
    for (std::size_t i = 0; i < got.size(); ++i)
        diff |= static_cast<unsigned char>(got[i] ^ want[i]);
    return diff == 0;
}

}  // namespace blobgate
