use wavelab::grid::{norm3, GridSpec};
use wavelab::symbols::{tabulate_kernel, SymbolSpec};

fn main() {
    let grid = GridSpec::new(2, 1024usize, 12.0f64).unwrap();
    let k = tabulate_kernel(&SymbolSpec::TildeTb { b: 1.0 }, grid).unwrap();
    // envelope in |1-r| separately inside/outside, 24 log bins over (1e-3, 1)
    let bins = 24usize;
    let (lo, hi) = (1e-3f64, 1.0f64);
    let step = (hi / lo).ln() / bins as f64;
    let mut inside = vec![0.0f64; bins];
    let mut outside = vec![0.0f64; bins];
    for i in 0..grid.size() {
        let r = norm3(grid.point(i));
        let s = (1.0 - r).abs();
        if s <= lo || s >= hi {
            continue;
        }
        let kbin = (((s / lo).ln() / step) as usize).min(bins - 1);
        let v = k.values()[i].norm();
        if r < 1.0 {
            inside[kbin] = inside[kbin].max(v);
        } else {
            outside[kbin] = outside[kbin].max(v);
        }
    }
    println!("s,inside,outside,s^-0.5/4");
    for kbin in 0..bins {
        let s = lo * ((kbin as f64 + 0.5) * step).exp();
        println!("{:.4},{:.4},{:.4},{:.4}", s, inside[kbin], outside[kbin], 0.25 * s.powf(-0.5));
    }
    // far field along the diagonal vs axis
    println!("r,axis,diag");
    let n = grid.points();
    for m in (n / 2 + 170)..(n / 2 + 512) {
        if (m - n / 2) % 48 != 0 {
            continue;
        }
        let x = grid.point(grid.ravel([m, n / 2, 0]));
        let va = k.values()[grid.ravel([m, n / 2, 0])].norm();
        let vd = k.values()[grid.ravel([m, m, 0])].norm();
        println!("{:.3},{:.3e},{:.3e}", x[0], va, vd);
    }
}
