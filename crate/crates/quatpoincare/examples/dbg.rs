use quatpoincare::clifford::{even_module, BlockLabel, Signature};
use quatpoincare::epa::*;
use quatpoincare::scalar::rint;

fn main() {
    for (p, q) in [(3usize, 0usize), (3, 1), (3, 2)] {
        let sig = Signature::new(p, q);
        let w = even_module(sig, &[(BlockLabel::Sigma, 1)]).unwrap();
        let basis = solve_equivariant(sig, &w, Variant::Super);
        println!("({p},{q}) symmetric solver dim = {}", basis.len());
        for (k, pi) in basis.iter().enumerate() {
            let b = canonical_b(&w, pi, 3);
            let nondeg = b.rank() == w.dim_w;
            println!("  basis[{k}]: b rank {} / {} nondeg={nondeg}", b.rank(), w.dim_w);
        }
        // also even solver dim for 2-Sigma golden
        if q == 0 {
            let w2 = even_module(sig, &[(BlockLabel::Sigma, 2)]).unwrap();
            let b2 = solve_equivariant(sig, &w2, Variant::Even);
            println!("(3,0) 2Sigma alternating solver dim = {}", b2.len());
        }
    }
    // (3,3) semispinor dims
    let sig = Signature::new(3, 3);
    let w = even_module(sig, &[(BlockLabel::SPlus, 1), (BlockLabel::SMinus, 1)]).unwrap();
    let basis = solve_equivariant(sig, &w, Variant::Even);
    println!("(3,3) S+ + S- alternating solver dim = {}", basis.len());
    for (k, pi) in basis.iter().enumerate() {
        let b = canonical_b(&w, pi, 3);
        println!("  basis[{k}]: b rank {}", b.rank());
    }
    let wp = even_module(sig, &[(BlockLabel::SPlus, 1)]).unwrap();
    println!("(3,3) S+ alternating dim = {}", solve_equivariant(sig, &wp, Variant::Even).len());
    // (3,0) canonical b golden matrix
    let sig = Signature::new(3, 0);
    let w = even_module(sig, &[(BlockLabel::Sigma, 1)]).unwrap();
    let pi = solve_equivariant(sig, &w, Variant::Even).remove(0);
    let b = canonical_b(&w, &pi, 3);
    println!("(3,0) normalized b = {:?}", b);
    let _ = rint(0);
}
