#![allow(dead_code)]

use branchlie::tree::{grigorchuk_generators, overgroup_generators, Automaton};

/// An identity as stated, with a corrected right-hand side where the
/// stated one does not hold.
pub struct Identity {
    pub name: &'static str,
    pub lhs: Automaton,
    pub stated: Automaton,
    pub corrected: Option<(&'static str, Automaton)>,
}

impl Identity {
    pub fn holds_as_stated(&self) -> bool {
        self.lhs.equals(&self.stated).unwrap()
    }

    pub fn holds_corrected(&self) -> bool {
        let rhs = self.corrected.as_ref().map_or(&self.stated, |(_, r)| r);
        self.lhs.equals(rhs).unwrap()
    }
}

fn id(name: &'static str, lhs: Automaton, stated: Automaton) -> Identity {
    Identity {
        name,
        lhs,
        stated,
        corrected: None,
    }
}

pub fn pair(g: &Automaton, h: &Automaton) -> Automaton {
    Automaton::from_wreath(0, &[g.clone(), h.clone()]).unwrap()
}

fn mul(gs: &[&Automaton]) -> Automaton {
    gs.iter()
        .fold(Automaton::identity(2), |acc, g| acc.compose(g).unwrap())
}

fn comm(g: &Automaton, h: &Automaton) -> Automaton {
    g.commutator(h).unwrap()
}

/// Commutator identities of the Grigorchuk group, with `x = [a, b]`,
/// `U = (1, x⁻¹) x` and `V = (x⁻¹, 1) x⁻¹`.
pub fn grigorchuk_identities() -> Vec<Identity> {
    let g = grigorchuk_generators();
    let (a, b, c, d) = (
        g.get("a").unwrap(),
        g.get("b").unwrap(),
        g.get("c").unwrap(),
        g.get("d").unwrap(),
    );
    let one = Automaton::identity(2);
    let x = comm(a, b);
    let xi = x.inverse();
    let x2 = mul(&[&x, &x]);
    let x4 = mul(&[&x2, &x2]);
    let u = mul(&[&pair(&one, &xi), &x]);
    let v = mul(&[&pair(&xi, &one), &xi]);
    vec![
        id("[x,a] = x^2", comm(&x, a), x2.clone()),
        id("[x,b] = x^2", comm(&x, b), x2.clone()),
        id(
            "[x,c] = x(1,x^-1)x",
            comm(&x, c),
            mul(&[&x, &pair(&one, &xi), &x]),
        ),
        id("[x,d] = (1,x)", comm(&x, d), pair(&one, &x)),
        id("[x^2,a] = x^4", comm(&x2, a), x4.clone()),
        Identity {
            corrected: Some((
                "x^4 = ((U,V)x^2,(U,V)x^2)",
                pair(&mul(&[&pair(&u, &v), &x2]), &mul(&[&pair(&u, &v), &x2])),
            )),
            ..id(
                "x^4 = ((U,V)x^2,(V,U)x^2)",
                x4.clone(),
                pair(&mul(&[&pair(&u, &v), &x2]), &mul(&[&pair(&v, &u), &x2])),
            )
        },
        id("[x^2,b] = x^4", comm(&x2, b), x4.clone()),
        id(
            "[x^2,c] = ((U,V)x^2,(1,x))",
            comm(&x2, c),
            pair(&mul(&[&pair(&u, &v), &x2]), &pair(&one, &x)),
        ),
        id(
            "[x^2,d] = (1,(U,1)x^2)",
            comm(&x2, d),
            pair(&one, &mul(&[&pair(&u, &one), &x2])),
        ),
    ]
}

/// Commutator identities of the overgroup, with `x = [a, bt]` and
/// `y = [a, dt]`.
pub fn overgroup_identities() -> Vec<Identity> {
    let g = overgroup_generators();
    let (a, b, c, d) = (
        g.get("a").unwrap(),
        g.get("bt").unwrap(),
        g.get("ct").unwrap(),
        g.get("dt").unwrap(),
    );
    let one = Automaton::identity(2);
    let x = comm(a, b);
    let y = comm(a, d);
    let x2 = mul(&[&x, &x]);
    vec![
        id("[x,a] = x^2", comm(&x, a), x2.clone()),
        id("[x,bt] = x^2", comm(&x, b), x2.clone()),
        id("[x,ct] = (1,y)", comm(&x, c), pair(&one, &y)),
        id("[x,dt] = (1,x)", comm(&x, d), pair(&one, &x)),
        id("[x^2,a] = 1", comm(&x2, a), one.clone()),
        id("[x^2,bt] = 1", comm(&x2, b), one.clone()),
        id("[x^2,ct] = 1", comm(&x2, c), one.clone()),
        Identity {
            corrected: Some(("[x^2,dt] = (1,(y,1))", pair(&one, &pair(&y, &one)))),
            ..id(
                "[x^2,dt] = (1,x(x,1)x)",
                comm(&x2, d),
                pair(&one, &mul(&[&x, &pair(&x, &one), &x])),
            )
        },
        id("[y,a] = 1", comm(&y, a), one.clone()),
        id("[y,bt] = (x^-1,1)", comm(&y, b), pair(&x.inverse(), &one)),
        id("[y,ct] = 1", comm(&y, c), one.clone()),
        id("[y,dt] = 1", comm(&y, d), one.clone()),
    ]
}
