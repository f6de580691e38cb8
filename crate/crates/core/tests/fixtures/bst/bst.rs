#[derive(Clone, Debug)]
pub enum Tree {
    E,
    T(Box<Tree>, i32, i32, Box<Tree>),
}

use Tree::{E, T};

pub fn insert(k: i32, v: i32, t: Tree) -> Tree {
    match t {
        E => T(Box::new(E), k, v, Box::new(E)),
        T(l, k2, v2, r) => {
            /*| insert */
            if k < k2 {
                T(Box::new(insert(k, v, *l)), k2, v2, r)
            } else if k2 < k {
                T(l, k2, v2, Box::new(insert(k, v, *r)))
            } else {
                T(l, k2, v, r)
            }
            /*|| insert_1 [easy] */
            /*| T(Box::new(E), k, v, Box::new(E)) */
            /*|| insert_2 */
            /*|
            if k < k2 {
                T(Box::new(insert(k, v, *l)), k2, v2, r)
            } else {
                T(l, k2, v, r)
            }
            */
            /*|| insert_3 */
            /*|
            if k < k2 {
                T(Box::new(insert(k, v, *l)), k2, v2, r)
            } else if k2 < k {
                T(l, k2, v2, Box::new(insert(k, v, *r)))
            } else {
                T(l, k2, v2, r)
            }
            */
            /* |*/
        }
    }
}

pub fn find(k: i32, t: &Tree) -> Option<i32> {
    match t {
        E => None,
        T(l, k2, v2, r) => {
            if k < *k2 {
                find(k, l)
            } else if *k2 < k {
                find(k, r)
            } else {
                /*| find [lookup] */
                Some(*v2)
                /*|| find_1 [easy] */
                /*| None */
                /* |*/
            }
        }
    }
}
