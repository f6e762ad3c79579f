/* Minimal consumer of the C interface.
 *
 * Build (from the workspace root, after `cargo build -p chsh-share-ffi`):
 *   cc -I crates/ffi/include crates/ffi/examples/smoke.c \
 *      -L target/debug -lchsh_share_ffi -lm -o smoke
 *   LD_LIBRARY_PATH=target/debug ./smoke
 */

#include "chsh_share.h"
#include <assert.h>
#include <math.h>
#include <stdio.h>

int main(void) {
    printf("version %s\n", css_version());

    double alphas[1] = {1.0};
    CssSimulation *sim = NULL;
    CssStatus st = css_simulate_new(CSS_SCHEME_PPM3, 1, 0.78539816339744830962,
                                    0.78539816339744830962, 1.0, alphas, &sim);
    assert(st == CSS_STATUS_OK);
    double closed = 0.0, brute = 0.0;
    assert(css_simulate_closed_form(sim, 0, &closed) == CSS_STATUS_OK);
    assert(css_simulate_bruteforce(sim, 0, &brute) == CSS_STATUS_OK);
    assert(fabs(closed - 2.0 * sqrt(2.0)) < 1e-10);
    assert(fabs(brute - 2.0 * sqrt(2.0)) < 1e-10);
    css_simulate_free(sim);

    CssSynthesis *syn = NULL;
    st = css_synthesize_t2(4, 0.009, 0.01, 0.3, &syn);
    assert(st == CSS_STATUS_OK);
    assert(css_synthesis_feasible(syn));
    assert(css_synthesis_len(syn) == 4);
    double margin = 0.0;
    assert(css_synthesis_margin(syn, 3, &margin) == CSS_STATUS_OK);
    assert(margin > 0.0);
    css_synthesis_free(syn);

    double eta = 0.0;
    assert(css_critical_eta(CSS_CURVE_EQUAL_UNSHARPNESS, 2.0, &eta) == CSS_STATUS_OK);
    assert(fabs(eta - 1.0) < 1e-12);

    printf("C smoke test ok: closed %.12f brute %.12f\n", closed, brute);
    return 0;
}
