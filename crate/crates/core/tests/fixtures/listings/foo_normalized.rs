/*| foo */
  foo(0)
/*|| foo_1 */
  foo(1)
/* |*/
