match t {
  E => T(E, k, v, E),
  T(l, k2, v2, r) => {
    /*| insert */
    if k < k2 {
      T(insert(k, v, *l), k2, v2, r)
    } else if k2 < k {
      T(l, k2, v2, insert(k, v, *r))
    } else {
      T(l, k2, v, r)
    }
    /*|| insert_1 */
    /*| T(E, k, v, E) */
    /* |*/
  },
}
