T(l, k2, v2, r) => {
  match () {
    _ if mutation_active("insert_1") => {
      T(E, k, v, E)
    }
    _ => { // base
      if k < k2 { 
        T(insert(k, v, *l), k2, v2, r)
      } else if k2 < k {
        T(l, k2, v2, insert(k, v, *r))
      } else {
        T(l, k2, v, r)
      }
    }
  }
}
