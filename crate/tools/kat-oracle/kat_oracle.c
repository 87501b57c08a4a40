/*
 * Known-answer vector generator.
 *
 * Each generator below is a transcription of its designers' published C
 * reference code. The output of this program is committed under
 * crates/core/kat/ and the Rust implementations are checked against it.
 *
 *   cc -O2 -o kat_oracle kat_oracle.c -lm && ./kat_oracle ../../crates/core/kat
 */
#include <inttypes.h>
#include <math.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#define COUNT 1000

/* ---- splitmix64 (Vigna) ---- */
static uint64_t sm_x;
static uint64_t splitmix64_next(void) {
    uint64_t z = (sm_x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

static inline uint64_t rotl(const uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

/* ---- xoshiro256++ / xoshiro256** (Blackman & Vigna) ---- */
static uint64_t s4[4];
static uint64_t xoshiro256pp_next(void) {
    const uint64_t result = rotl(s4[0] + s4[3], 23) + s4[0];
    const uint64_t t = s4[1] << 17;
    s4[2] ^= s4[0];
    s4[3] ^= s4[1];
    s4[1] ^= s4[2];
    s4[0] ^= s4[3];
    s4[2] ^= t;
    s4[3] = rotl(s4[3], 45);
    return result;
}
static uint64_t xoshiro256ss_next(void) {
    const uint64_t result = rotl(s4[1] * 5, 7) * 9;
    const uint64_t t = s4[1] << 17;
    s4[2] ^= s4[0];
    s4[3] ^= s4[1];
    s4[1] ^= s4[2];
    s4[0] ^= s4[3];
    s4[2] ^= t;
    s4[3] = rotl(s4[3], 45);
    return result;
}

/* ---- xoroshiro1024** (Blackman & Vigna) ---- */
static int p16;
static uint64_t s16[16];
static uint64_t x1024ss_next(void) {
    const int q = p16;
    const uint64_t s0 = s16[p16 = (p16 + 1) & 15];
    uint64_t s15 = s16[q];
    const uint64_t result = rotl(s0 * 5, 7) * 9;
    s15 ^= s0;
    s16[q] = rotl(s0, 25) ^ s15 ^ (s15 << 27);
    s16[p16] = rotl(s15, 36);
    return result;
}

/* ---- MT19937 (Matsumoto & Nishimura, mt19937ar.c) ---- */
#define MT_N 624
#define MT_M 397
#define MATRIX_A 0x9908b0dfUL
#define UPPER_MASK 0x80000000UL
#define LOWER_MASK 0x7fffffffUL
static unsigned long mt[MT_N];
static int mti = MT_N + 1;
static void init_genrand(unsigned long s) {
    mt[0] = s & 0xffffffffUL;
    for (mti = 1; mti < MT_N; mti++) {
        mt[mti] = (1812433253UL * (mt[mti - 1] ^ (mt[mti - 1] >> 30)) + mti);
        mt[mti] &= 0xffffffffUL;
    }
}
static void init_by_array(unsigned long init_key[], int key_length) {
    int i, j, k;
    init_genrand(19650218UL);
    i = 1;
    j = 0;
    k = (MT_N > key_length ? MT_N : key_length);
    for (; k; k--) {
        mt[i] = (mt[i] ^ ((mt[i - 1] ^ (mt[i - 1] >> 30)) * 1664525UL)) + init_key[j] + j;
        mt[i] &= 0xffffffffUL;
        i++;
        j++;
        if (i >= MT_N) {
            mt[0] = mt[MT_N - 1];
            i = 1;
        }
        if (j >= key_length) j = 0;
    }
    for (k = MT_N - 1; k; k--) {
        mt[i] = (mt[i] ^ ((mt[i - 1] ^ (mt[i - 1] >> 30)) * 1566083941UL)) - i;
        mt[i] &= 0xffffffffUL;
        i++;
        if (i >= MT_N) {
            mt[0] = mt[MT_N - 1];
            i = 1;
        }
    }
    mt[0] = 0x80000000UL;
}
static unsigned long genrand_int32(void) {
    unsigned long y;
    static unsigned long mag01[2] = {0x0UL, MATRIX_A};
    if (mti >= MT_N) {
        int kk;
        if (mti == MT_N + 1) init_genrand(5489UL);
        for (kk = 0; kk < MT_N - MT_M; kk++) {
            y = (mt[kk] & UPPER_MASK) | (mt[kk + 1] & LOWER_MASK);
            mt[kk] = mt[kk + MT_M] ^ (y >> 1) ^ mag01[y & 0x1UL];
        }
        for (; kk < MT_N - 1; kk++) {
            y = (mt[kk] & UPPER_MASK) | (mt[kk + 1] & LOWER_MASK);
            mt[kk] = mt[kk + (MT_M - MT_N)] ^ (y >> 1) ^ mag01[y & 0x1UL];
        }
        y = (mt[MT_N - 1] & UPPER_MASK) | (mt[0] & LOWER_MASK);
        mt[MT_N - 1] = mt[MT_M - 1] ^ (y >> 1) ^ mag01[y & 0x1UL];
        mti = 0;
    }
    y = mt[mti++];
    y ^= (y >> 11);
    y ^= (y << 7) & 0x9d2c5680UL;
    y ^= (y << 15) & 0xefc60000UL;
    y ^= (y >> 18);
    return y;
}
static double genrand_res53(void) {
    unsigned long a = genrand_int32() >> 5, b = genrand_int32() >> 6;
    return (a * 67108864.0 + b) * (1.0 / 9007199254740992.0);
}

/* ---- MRG32k3a (L'Ecuyer 1999, floating-point reference) ---- */
#define norm 2.328306549295727688e-10
#define m1 4294967087.0
#define m2 4294944443.0
#define a12 1403580.0
#define a13n 810728.0
#define a21 527612.0
#define a23n 1370589.0
static double s10, s11, s12, s20, s21, s22;
static double MRG32k3a(void) {
    long k;
    double p1, p2;
    p1 = a12 * s11 - a13n * s10;
    k = p1 / m1;
    p1 -= k * m1;
    if (p1 < 0.0) p1 += m1;
    s10 = s11;
    s11 = s12;
    s12 = p1;
    p2 = a21 * s22 - a23n * s20;
    k = p2 / m2;
    p2 -= k * m2;
    if (p2 < 0.0) p2 += m2;
    s20 = s21;
    s21 = s22;
    s22 = p2;
    if (p1 <= p2)
        return ((p1 - p2 + m1) * norm);
    else
        return ((p1 - p2) * norm);
}

/* ---- Philox4x32-10 (Random123) ---- */
#define PHILOX_M4x32_0 0xD2511F53U
#define PHILOX_M4x32_1 0xCD9E8D57U
#define PHILOX_W32_0 0x9E3779B9U
#define PHILOX_W32_1 0xBB67AE85U
static uint32_t mulhilo32(uint32_t a, uint32_t b, uint32_t *hip) {
    uint64_t product = ((uint64_t)a) * ((uint64_t)b);
    *hip = product >> 32;
    return (uint32_t)product;
}
static void philox4x32round(uint32_t ctr[4], const uint32_t key[2]) {
    uint32_t hi0, hi1;
    uint32_t lo0 = mulhilo32(PHILOX_M4x32_0, ctr[0], &hi0);
    uint32_t lo1 = mulhilo32(PHILOX_M4x32_1, ctr[2], &hi1);
    uint32_t out[4] = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    memcpy(ctr, out, sizeof out);
}
static void philox4x32_10(const uint32_t in[4], const uint32_t key_in[2], uint32_t out[4]) {
    uint32_t key[2] = {key_in[0], key_in[1]};
    memcpy(out, in, 16);
    for (int r = 0; r < 10; r++) {
        if (r > 0) {
            key[0] += PHILOX_W32_0;
            key[1] += PHILOX_W32_1;
        }
        philox4x32round(out, key);
    }
}
static uint32_t ph_key[2], ph_ctr[4], ph_buf[4];
static int ph_idx = 4;
static uint32_t philox_next(void) {
    if (ph_idx == 4) {
        philox4x32_10(ph_ctr, ph_key, ph_buf);
        for (int i = 0; i < 4; i++)
            if (++ph_ctr[i] != 0) break;
        ph_idx = 0;
    }
    return ph_buf[ph_idx++];
}

/* ---- PCG32 minimal (O'Neill, pcg_basic.c) ---- */
typedef struct {
    uint64_t state;
    uint64_t inc;
} pcg32_random_t;
static pcg32_random_t pcg;
static uint32_t pcg32_random_r(pcg32_random_t *rng) {
    uint64_t oldstate = rng->state;
    rng->state = oldstate * 6364136223846793005ULL + (rng->inc | 1);
    uint32_t xorshifted = ((oldstate >> 18u) ^ oldstate) >> 27u;
    uint32_t rot = oldstate >> 59u;
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31));
}
static void pcg32_srandom_r(pcg32_random_t *rng, uint64_t initstate, uint64_t initseq) {
    rng->state = 0U;
    rng->inc = (initseq << 1u) | 1u;
    pcg32_random_r(rng);
    rng->state += initstate;
    pcg32_random_r(rng);
}

/* ---- output helpers ---- */
static FILE *out;
static void open_out(const char *dir, const char *name) {
    char path[1024];
    snprintf(path, sizeof path, "%s/%s.kat", dir, name);
    out = fopen(path, "w");
    if (!out) {
        perror(path);
        exit(1);
    }
    fprintf(out, "# %s known-answer vectors, %d outputs per seeding\n", name, COUNT);
}
static void dump_u64(uint64_t (*f)(void)) {
    for (int i = 0; i < COUNT; i++) fprintf(out, "%016" PRIx64 "\n", f());
}
static void dump_u32(uint32_t (*f)(void)) {
    for (int i = 0; i < COUNT; i++) fprintf(out, "%08" PRIx32 "\n", f());
}

static void xoshiro_fill_index(uint64_t seed, uint64_t *s, int n) {
    sm_x = seed;
    for (int i = 0; i < n; i++) s[i] = splitmix64_next();
}

static void mrg_fill_index(unsigned long seed) {
    double v[6];
    init_genrand(seed);
    for (int i = 0; i < 6; i++) v[i] = floor(genrand_res53() * (i < 3 ? m1 : m2));
    while (v[0] == 0.0 && v[1] == 0.0 && v[2] == 0.0)
        for (int i = 0; i < 3; i++) v[i] = floor(genrand_res53() * m1);
    while (v[3] == 0.0 && v[4] == 0.0 && v[5] == 0.0)
        for (int i = 3; i < 6; i++) v[i] = floor(genrand_res53() * m2);
    s10 = v[0];
    s11 = v[1];
    s12 = v[2];
    s20 = v[3];
    s21 = v[4];
    s22 = v[5];
}
static void dump_mrg(void) {
    for (int i = 0; i < COUNT; i++) {
        double u = MRG32k3a();
        uint64_t bits;
        memcpy(&bits, &u, sizeof bits);
        fprintf(out, "%016" PRIx64 "\n", bits);
    }
}

static void philox_index(unsigned long seed) {
    init_genrand(seed);
    ph_key[0] = (uint32_t)genrand_int32();
    ph_key[1] = (uint32_t)genrand_int32();
    memset(ph_ctr, 0, sizeof ph_ctr);
    ph_idx = 4;
}

static uint32_t pcg_next(void) { return pcg32_random_r(&pcg); }
static uint32_t mt_next(void) { return (uint32_t)genrand_int32(); }

int main(int argc, char **argv) {
    const char *dir = argc > 1 ? argv[1] : ".";

    open_out(dir, "splitmix64");
    uint64_t sm_seeds[3] = {0, 1, 0x0123456789abcdefULL};
    for (int k = 0; k < 3; k++) {
        fprintf(out, "seeding state %016" PRIx64 "\n", sm_seeds[k]);
        sm_x = sm_seeds[k];
        dump_u64(splitmix64_next);
    }
    fclose(out);

    uint64_t (*x256[2])(void) = {xoshiro256pp_next, xoshiro256ss_next};
    const char *x256_names[2] = {"xoshiro256pp", "xoshiro256ss"};
    uint64_t idx[2] = {0, 1000};
    for (int g = 0; g < 2; g++) {
        open_out(dir, x256_names[g]);
        for (int k = 0; k < 2; k++) {
            fprintf(out, "seeding index %" PRIu64 "\n", idx[k]);
            xoshiro_fill_index(idx[k], s4, 4);
            dump_u64(x256[g]);
        }
        fprintf(out, "seeding state 1 2 3 4\n");
        for (int i = 0; i < 4; i++) s4[i] = i + 1;
        dump_u64(x256[g]);
        fclose(out);
    }

    open_out(dir, "xoshiro1024ss");
    for (int k = 0; k < 2; k++) {
        fprintf(out, "seeding index %" PRIu64 "\n", idx[k]);
        xoshiro_fill_index(idx[k], s16, 16);
        p16 = 0;
        dump_u64(x1024ss_next);
    }
    fprintf(out, "seeding state 1 2 3 4 5 6 7 8 9 10 11 12 13 14 15 16\n");
    for (int i = 0; i < 16; i++) s16[i] = i + 1;
    p16 = 0;
    dump_u64(x1024ss_next);
    fclose(out);

    open_out(dir, "mrg32k3a");
    fprintf(out, "seeding state 12345 12345 12345 12345 12345 12345\n");
    s10 = s11 = s12 = s20 = s21 = s22 = 12345.0;
    dump_mrg();
    for (int k = 0; k < 2; k++) {
        fprintf(out, "seeding index %" PRIu64 "\n", idx[k]);
        mrg_fill_index((unsigned long)idx[k]);
        dump_mrg();
    }
    fclose(out);

    open_out(dir, "philox4x32");
    unsigned long ph_seeds[3] = {0, 1, 2001};
    for (int k = 0; k < 3; k++) {
        fprintf(out, "seeding index %lu\n", ph_seeds[k]);
        philox_index(ph_seeds[k]);
        dump_u32(philox_next);
    }
    fclose(out);

    open_out(dir, "pcg32");
    fprintf(out, "seeding srandom 42 54\n");
    pcg32_srandom_r(&pcg, 42u, 54u);
    dump_u32(pcg_next);
    uint64_t pcg_seeds[2] = {0, 2001};
    for (int k = 0; k < 2; k++) {
        fprintf(out, "seeding index %" PRIu64 "\n", pcg_seeds[k]);
        pcg.state = pcg_seeds[k];
        pcg.inc = 1;
        pcg32_random_r(&pcg);
        dump_u32(pcg_next);
    }
    fclose(out);

    open_out(dir, "mt19937");
    unsigned long mt_seeds[2] = {5489, 0};
    for (int k = 0; k < 2; k++) {
        fprintf(out, "seeding genrand %lu\n", mt_seeds[k]);
        init_genrand(mt_seeds[k]);
        dump_u32(mt_next);
    }
    fprintf(out, "seeding by_array 291 564 837 1110\n");
    unsigned long init[4] = {0x123, 0x234, 0x345, 0x456};
    init_by_array(init, 4);
    dump_u32(mt_next);
    fclose(out);

    /* res53 check values: first three doubles after init_genrand(0) */
    open_out(dir, "mt19937_res53");
    fprintf(out, "seeding genrand 0\n");
    init_genrand(0);
    for (int i = 0; i < COUNT; i++) {
        double u = genrand_res53();
        uint64_t bits;
        memcpy(&bits, &u, sizeof bits);
        fprintf(out, "%016" PRIx64 "\n", bits);
    }
    fclose(out);

    /* Random123 kat_vectors lines, regenerated for self-check */
    uint32_t kin[3][4] = {{0, 0, 0, 0}, {0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                          {0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}};
    uint32_t kkey[3][2] = {{0, 0}, {0xffffffff, 0xffffffff}, {0xa4093822, 0x299f31d0}};
    for (int k = 0; k < 3; k++) {
        uint32_t o[4];
        philox4x32_10(kin[k], kkey[k], o);
        fprintf(stderr, "philox4x32 10 -> %08x %08x %08x %08x\n", o[0], o[1], o[2], o[3]);
    }
    pcg32_srandom_r(&pcg, 42u, 54u);
    fprintf(stderr, "pcg32 demo first: %08x\n", pcg32_random_r(&pcg));
    sm_x = 0;
    fprintf(stderr, "splitmix64(0) first: %016" PRIx64 "\n", splitmix64_next());
    init_by_array(init, 4);
    fprintf(stderr, "mt by_array first: %lu %lu %lu\n", genrand_int32(), genrand_int32(), genrand_int32());
    init_genrand(5489);
    fprintf(stderr, "mt 5489 first: %lu\n", genrand_int32());
    for (int i = 0; i < 4; i++) s4[i] = i + 1;
    fprintf(stderr, "xoshiro256** 1234: %" PRIu64 " %" PRIu64 " %" PRIu64 "\n", xoshiro256ss_next(), xoshiro256ss_next(), xoshiro256ss_next());
    s10 = s11 = s12 = s20 = s21 = s22 = 12345.0;
    fprintf(stderr, "mrg32k3a 12345: %.17g %.17g\n", MRG32k3a(), MRG32k3a());
    return 0;
}
